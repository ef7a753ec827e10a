# Libs
from django.core.management.base import BaseCommand
from rich.console import Console

# Apps
from apps.cli.services import decompose as sv
from apps.diagnostics.services.heatmap import render_heatmap

# Global
from common.decorators import command_errors
from constants import COMPONENT_LABEL, METHODS


class Command(BaseCommand):
    help = (
        "Decompose a CSV series with Basic SSA, Iterative O-SSA or DerivSSA "
        "and write components.csv, wcor.csv and summary.json."
    )

    def add_arguments(self, parser):
        parser.add_argument("--input", help="Series CSV, one value per row.")
        parser.add_argument("--window", type=int, help="Window length L.")
        parser.add_argument("--method", choices=METHODS)
        parser.add_argument("--groups", help='Basic SSA groups, e.g. "1,2;3,4".')
        parser.add_argument(
            "--partition", help="Regrouping of the refined components."
        )
        parser.add_argument("--epsilon", type=float)
        parser.add_argument("--max-iter", dest="max_iter", type=int)
        parser.add_argument("--kappa", type=float)
        parser.add_argument("--gamma", type=float)
        parser.add_argument("--output", help="Artifact directory.")
        parser.add_argument(
            "--config", help="JSON file with the options; flags override it."
        )
        parser.add_argument("--heatmap", action="store_true", default=None)
        parser.add_argument("--frequencies", action="store_true", default=None)

    @command_errors
    def handle(self, *args, **options):
        flags = {
            key: options.get(key)
            for key in (
                "input",
                "window",
                "method",
                "groups",
                "partition",
                "epsilon",
                "max_iter",
                "kappa",
                "gamma",
                "output",
                "heatmap",
                "frequencies",
            )
        }
        merged = sv.merge_options(sv.load_config(options.get("config")), flags)
        outcome, diagnostics, output = sv.decompose(merged)

        if merged.get("heatmap"):
            console = Console(file=self.stdout, color_system=None)
            heatmap = render_heatmap(diagnostics.wcor_after, title="w-correlations")
            console.print(heatmap)
        if diagnostics.frequencies is not None:
            for index, frequency in enumerate(diagnostics.frequencies, start=1):
                label = COMPONENT_LABEL.format(index=index)
                self.stdout.write(f"{label}: frequency {frequency}")
        self.stdout.write(
            self.style.SUCCESS(
                f"{len(outcome.components)} components written to {output}"
            )
        )
