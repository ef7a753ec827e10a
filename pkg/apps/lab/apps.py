from django.apps import AppConfig


class LabConfig(AppConfig):
    """Signal lab application config."""

    name = "apps.lab"
    verbose_name = "Signal lab"
