from django.apps import AppConfig


class DerivConfig(AppConfig):
    """DerivSSA application config."""

    name = "apps.deriv"
    verbose_name = "DerivSSA"
