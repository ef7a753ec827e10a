# Libs
from django.core.management.base import BaseCommand, CommandError

# Apps
from apps.cli.services import scenario as sv
from apps.cli.services.artifacts import render_json
from apps.lab.services.scenarios import run_scenario

# Global
from common.decorators import command_errors
from common.functions import format_float
from constants import EXIT_EXPECTATION_MISS


class Command(BaseCommand):
    help = (
        "Reproduce a registered scenario and check it against its expected "
        'values; "list" prints the registry.'
    )

    def add_arguments(self, parser):
        parser.add_argument("name", help='Scenario name, or "list".')
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            metavar="KEY=VALUE",
            help="Override a scenario parameter; repeatable.",
        )
        parser.add_argument(
            "--output", default=".", help="Directory for report.json (default: .)."
        )

    @command_errors
    def handle(self, *args, **options):
        if options["name"] == "list":
            self.stdout.write(render_json(sv.registry_listing()).decode())
            return

        overrides = sv.parse_overrides(options.get("overrides"))
        result = run_scenario(options["name"], overrides=overrides)
        path = sv.write_report(output=options["output"], result=result)
        self.stdout.write(f"Report written to {path}")

        for check in result.checks:
            computed = "-" if check.computed is None else format_float(check.computed)
            verdict = (
                self.style.SUCCESS("pass") if check.passed else self.style.ERROR("miss")
            )
            self.stdout.write(
                f"{check.metric}: {computed} "
                f"(expected {check.expected.mode} {check.expected.value}) {verdict}"
            )

        if not result.passed:
            missed = [check.metric for check in result.checks if not check.passed]
            raise CommandError(
                f"Scenario {options['name']} missed: {', '.join(missed)}",
                returncode=EXIT_EXPECTATION_MISS,
            )
