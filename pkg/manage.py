#!/usr/bin/env python
"""Entry point of the SSA toolkit: run `python manage.py help` for commands."""
import os
import sys


def main():
    """Run a toolkit or Django command."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the dependencies with "
            "`pip install -r requirements.txt` in an active virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
