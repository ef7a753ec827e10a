from django.apps import AppConfig


class DecompositionConfig(AppConfig):
    """Decomposition application config."""

    name = "apps.decomposition"
    verbose_name = "Decomposition"
