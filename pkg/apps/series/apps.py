from django.apps import AppConfig


class SeriesConfig(AppConfig):
    """Time series application config."""

    name = "apps.series"
    verbose_name = "Time series"
