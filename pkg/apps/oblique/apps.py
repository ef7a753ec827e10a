from django.apps import AppConfig


class ObliqueConfig(AppConfig):
    """Oblique algebra application config."""

    name = "apps.oblique"
    verbose_name = "Oblique algebra"
