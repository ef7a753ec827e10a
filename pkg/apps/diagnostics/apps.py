from django.apps import AppConfig


class DiagnosticsConfig(AppConfig):
    """Diagnostics application config."""

    name = "apps.diagnostics"
    verbose_name = "Diagnostics"
