from django.apps import AppConfig


class IossaConfig(AppConfig):
    """Iterative oblique SSA application config."""

    name = "apps.iossa"
    verbose_name = "Iterative oblique SSA"
