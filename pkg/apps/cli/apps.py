from django.apps import AppConfig


class CliConfig(AppConfig):
    """Command line application config."""

    name = "apps.cli"
    verbose_name = "Command line"
