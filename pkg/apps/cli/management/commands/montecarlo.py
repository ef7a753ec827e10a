# Libs
from django.core.management.base import BaseCommand

# Apps
from apps.cli.services.artifacts import write_sweep
from apps.cli.services.scenario import parse_overrides
from apps.cli.services.sweep import parse_grid, parse_skips
from apps.lab.services.montecarlo import monte_carlo
from apps.lab.services.registry import apply_overrides, get_scenario

# Global
from common.decorators import command_errors


class Command(BaseCommand):
    help = (
        "Repeat a noisy scenario over a parameter grid and write one CSV row "
        "of winsorized metrics per grid point."
    )

    def add_arguments(self, parser):
        parser.add_argument("name", help="Scenario name.")
        parser.add_argument(
            "--sweep",
            action="append",
            metavar="NAME=START:STOP:STEP",
            help="Swept parameter, as a range or a comma list; repeatable.",
        )
        parser.add_argument(
            "--skip",
            action="append",
            metavar="NAME=VALUE",
            help="Drop grid points where a parameter equals a value.",
        )
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            metavar="KEY=VALUE",
            help="Override a scenario parameter; repeatable.",
        )
        parser.add_argument("--reps", type=int, default=100)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--winsorize", type=float, help="Tail fraction.")
        parser.add_argument("--output", help="CSV path; stdout when omitted.")

    @command_errors
    def handle(self, *args, **options):
        name = options["name"]
        overrides = parse_overrides(options.get("overrides"))
        params = apply_overrides(get_scenario(name).params, overrides)
        points = monte_carlo(
            name,
            options["reps"],
            options["seed"],
            parse_grid(options.get("sweep")),
            skip=parse_skips(options.get("skip"), params=params),
            overrides=overrides,
            winsorize_fraction=options.get("winsorize"),
            workers=options.get("workers"),
        )

        if options.get("output"):
            with open(options["output"], "w", newline="") as file:
                write_sweep(file=file, points=points)
            self.stdout.write(
                f"{len(points)} grid points written to {options['output']}"
            )
        else:
            write_sweep(file=self.stdout, points=points)
