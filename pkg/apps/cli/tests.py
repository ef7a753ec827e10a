# Core
import csv
import json
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

# Libs
import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose

# Apps
from apps.cli.services.artifacts import render_json
from apps.cli.services.decompose import merge_options
from apps.lab.services.registry import get_scenario
from apps.lab.services.scenarios import scenario_series
from apps.series.services.csv_io import read_series, write_series

# Global
from common.exceptions import RankDeficientStack
from constants import (
    EXIT_EXPECTATION_MISS,
    EXIT_NUMERICAL,
    EXIT_USAGE,
    SCHEMA_VERSION,
)


def _read_csv(path) -> list[list[str]]:
    with open(path, newline="") as file:
        return list(csv.reader(file))


class _WorkspaceTestCase(SimpleTestCase):
    scenario = "deriv-equal-amp"

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.addCleanup(self.folder.cleanup)
        self.root = Path(self.folder.name)
        self.series = scenario_series(get_scenario(self.scenario).params)
        self.input = self.root / "series.csv"
        write_series(self.input, self.series, header="value")
        self.output = self.root / "out"

    def decompose(self, **options):
        out = StringIO()
        call_command(
            "decompose",
            input=str(self.input),
            output=str(self.output),
            stdout=out,
            **options,
        )
        return out.getvalue()

    def summary(self) -> dict:
        return json.loads((self.output / "summary.json").read_text())


class DecomposeCommandTests(_WorkspaceTestCase):
    def test_basic_artifacts(self):
        self.decompose(window=70, method="basic", groups="1,2;3,4")

        rows = _read_csv(self.output / "components.csv")
        self.assertEqual(rows[0], ["component_1", "component_2", "residual"])
        values = np.array(rows[1:], dtype=float)
        self.assertEqual(values.shape, (150, 3))
        assert_allclose(values.sum(axis=1), self.series.values, atol=1e-8)

        wcor = _read_csv(self.output / "wcor.csv")
        self.assertEqual(wcor[0], ["", "component_1", "component_2"])
        self.assertEqual(wcor[1][0], "component_1")

        summary = self.summary()
        self.assertEqual(summary["schema_version"], SCHEMA_VERSION)
        self.assertEqual(summary["method"], "basic")
        self.assertEqual(summary["params"]["window"], 70)
        diagnostics = summary["diagnostics"]
        self.assertAlmostEqual(abs(diagnostics["wcor_after"][0][1]), 0.92, delta=0.03)
        self.assertEqual(len(diagnostics["tau"]), 2)
        self.assertIsNone(diagnostics["lr_wcor"])
        self.assertIsNone(diagnostics["iterations"])
        text = (self.output / "summary.json").read_text()
        self.assertIn('"epsilon": 1.0000000000000001e-05', text)

    def test_components_round_trip(self):
        self.decompose(window=70, method="deriv", groups="1,2;3,4", gamma=10.0)
        rows = _read_csv(self.output / "components.csv")
        columns = np.array(rows[1:], dtype=float).T
        for index, column in enumerate(columns[:-1], start=1):
            path = self.root / f"component_{index}.csv"
            write_series(path, column)
            assert_allclose(read_series(path).values, column, rtol=0, atol=0)
        assert_allclose(columns.sum(axis=0), self.series.values, atol=1e-8)

    def test_deriv_separates(self):
        self.decompose(window=70, method="deriv", groups="1,2;3,4", gamma=10.0)
        diagnostics = self.summary()["diagnostics"]
        self.assertLessEqual(abs(diagnostics["wcor_after"][0][1]), 0.02)
        self.assertAlmostEqual(abs(diagnostics["wcor_before"][0][1]), 0.92, delta=0.03)
        self.assertLess(np.mean(diagnostics["tau"]), 1e-3)
        self.assertEqual(len(diagnostics["lr_wcor"]), 2)

    def test_frequencies_and_heatmap(self):
        output = self.decompose(
            window=70,
            method="deriv",
            groups="1,2;3,4",
            gamma=10.0,
            frequencies=True,
            heatmap=True,
        )
        frequencies = self.summary()["diagnostics"]["frequencies"]
        assert_allclose(sorted(frequencies), [1 / 15, 0.1], atol=5e-3)
        self.assertIn("w-correlations", output)
        self.assertIn("component_2", output)

    def test_config_file_with_flag_override(self):
        config = self.root / "config.json"
        config.write_text(
            json.dumps({"window": 50, "method": "basic", "groups": "1,2;3,4"})
        )
        self.decompose(config=str(config), window=70)
        self.assertEqual(self.summary()["params"]["window"], 70)

    def test_merge_options(self):
        merged = merge_options(
            {"window": 50, "heatmap": True}, {"window": 70, "heatmap": None}
        )
        self.assertEqual(merged, {"window": 70, "heatmap": True})

    def test_window_out_of_range(self):
        with self.assertRaises(CommandError) as ctx:
            self.decompose(window=1, method="basic", groups="1,2")
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)
        self.assertIn("WindowOutOfRange", str(ctx.exception))

    def test_invalid_config(self):
        for options in (
            {"method": "basic", "gamma": 1.0},
            {"method": "deriv"},
            {"method": "deriv", "gamma": 1.0, "kappa": 2.0},
            {"method": "basic", "partition": "1;2"},
            {"method": "iossa", "epsilon": 0.0},
        ):
            with self.subTest(options=options):
                with self.assertRaises(CommandError) as ctx:
                    self.decompose(window=70, groups="1,2;3,4", **options)
                self.assertEqual(ctx.exception.returncode, EXIT_USAGE)
                self.assertIn("InvalidConfig", str(ctx.exception))

    def test_invalid_groups(self):
        with self.assertRaises(CommandError) as ctx:
            self.decompose(window=70, method="basic", groups="1,x")
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)
        self.assertIn("InvalidGroupSpec", str(ctx.exception))

    def test_unreadable_config(self):
        config = self.root / "config.json"
        config.write_text("{window: 70")
        with self.assertRaises(CommandError) as ctx:
            self.decompose(config=str(config))
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)

    def test_missing_input(self):
        self.input = self.root / "missing.csv"
        with self.assertRaises(CommandError) as ctx:
            self.decompose(window=70, method="basic", groups="1,2")
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)
        self.assertIn("InvalidConfig", str(ctx.exception))
        self.assertIn("missing.csv", str(ctx.exception))

    def test_numerical_failure(self):
        failure = RankDeficientStack("Stacked bases lost rank.")
        with mock.patch(
            "apps.cli.services.decompose.run_pipeline", side_effect=failure
        ):
            with self.assertRaises(CommandError) as ctx:
                self.decompose(window=70, method="iossa", groups="1,2;3,4")
        self.assertEqual(ctx.exception.returncode, EXIT_NUMERICAL)
        errors = self.summary()["errors"]
        self.assertEqual(errors["code"], "RankDeficientStack")
        self.assertFalse((self.output / "components.csv").exists())


class ScenarioCommandTests(SimpleTestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.addCleanup(self.folder.cleanup)
        self.output = Path(self.folder.name)

    def test_list(self):
        out = StringIO()
        call_command("scenario", "list", stdout=out)
        listing = json.loads(out.getvalue())
        names = [entry["name"] for entry in listing]
        self.assertIn("iossa-close-freq", names)
        self.assertEqual(names, sorted(names))
        entry = next(e for e in listing if e["name"] == "deriv-equal-amp")
        self.assertEqual(entry["method"], "deriv")
        self.assertEqual(entry["expected"]["wcor_after"]["mode"], "abs_upper")

    def test_unknown_scenario(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("scenario", "no-such-scenario", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)

    def test_report(self):
        out = StringIO()
        call_command("scenario", "demo-sep-A", output=str(self.output), stdout=out)
        report = json.loads((self.output / "report.json").read_text())
        self.assertTrue(report["passed"])
        self.assertEqual(report["scenario"], "demo-sep-A")
        self.assertEqual(report["checks"][0]["metric"], "cross_block")
        self.assertIn("pass", out.getvalue())

    def test_expectation_miss(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "scenario",
                "iossa-close-freq-080",
                overrides=["max_iter=1"],
                output=str(self.output),
                stdout=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, EXIT_EXPECTATION_MISS)
        report = json.loads((self.output / "report.json").read_text())
        self.assertFalse(report["passed"])
        self.assertEqual(report["params"]["max_iter"], 1)
        missed = {c["metric"] for c in report["checks"] if not c["passed"]}
        self.assertEqual(missed, {"iterations", "converged"})

    def test_bad_override(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "scenario", "demo-sep-A", overrides=["delta=1"], stdout=StringIO()
            )
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)

    def test_report_defaults_to_working_directory(self):
        previous = os.getcwd()
        os.chdir(self.output)
        self.addCleanup(os.chdir, previous)
        out = StringIO()
        call_command("scenario", "demo-sep-A", stdout=out)
        report = json.loads((self.output / "report.json").read_text())
        self.assertEqual(report["scenario"], "demo-sep-A")
        self.assertIn("report.json", out.getvalue())

    @tag("acceptance")
    def test_close_frequencies(self):
        call_command(
            "scenario", "iossa-close-freq", output=str(self.output), stdout=StringIO()
        )
        report = json.loads((self.output / "report.json").read_text())
        self.assertTrue(report["passed"])


class MonteCarloCommandTests(SimpleTestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.addCleanup(self.folder.cleanup)
        self.root = Path(self.folder.name)

    def montecarlo(self, *args, **options) -> str:
        out = StringIO()
        call_command(
            "montecarlo",
            "deriv-equal-amp",
            *args,
            overrides=["sigma=0.3"],
            stdout=out,
            **options,
        )
        return out.getvalue()

    def test_single_point(self):
        output = self.montecarlo(sweep=["gamma=10"], reps=1, seed=3)
        rows = list(csv.reader(StringIO(output)))
        self.assertEqual(len(rows), 2)
        header = rows[0]
        self.assertEqual(header[:3], ["gamma", "replicates", "failures"])
        self.assertIn("rmse_omega1", header)
        self.assertIn("mean_sq_error_omega2", header)
        self.assertEqual(rows[1][1], "1")
        self.assertLess(float(rows[1][header.index("rmse_omega1")]), 0.01)

    def test_deterministic_output(self):
        paths = [self.root / "first.csv", self.root / "second.csv"]
        for path, workers in zip(paths, (1, 2)):
            self.montecarlo(
                sweep=["gamma=5,10"], reps=2, seed=7, workers=workers, output=str(path)
            )
        self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())
        self.assertEqual(len(_read_csv(paths[0])), 3)

    def test_skip_by_parameter(self):
        output = self.montecarlo(
            sweep=["omega1=0.1,0.06666666666666667"],
            skip=["omega1=omega2"],
            reps=1,
        )
        rows = list(csv.reader(StringIO(output)))
        self.assertEqual(len(rows), 2)
        self.assertEqual(float(rows[1][0]), 0.1)

    def test_bad_grid(self):
        for sweep in (["omega1=0.1:0.05:0.01"], ["omega1=0.1:0.2"], ["omega1"]):
            with self.subTest(sweep=sweep):
                with self.assertRaises(CommandError) as ctx:
                    self.montecarlo(sweep=sweep, reps=1)
                self.assertEqual(ctx.exception.returncode, EXIT_USAGE)

    def test_everything_skipped(self):
        with self.assertRaises(CommandError) as ctx:
            self.montecarlo(sweep=["gamma=10"], skip=["gamma=10"], reps=1)
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)


class RenderJsonTests(SimpleTestCase):
    def test_floats_keep_seventeen_digits(self):
        text = render_json({"step": 0.1, "scale": 2.0, "count": 3, "tiny": [1e-5]})
        text = text.decode()
        self.assertIn('"step": 0.10000000000000001', text)
        self.assertIn('"scale": 2.0', text)
        self.assertIn('"count": 3', text)
        self.assertIn("1.0000000000000001e-05", text)
        self.assertEqual(
            json.loads(text),
            {"step": 0.1, "scale": 2.0, "count": 3, "tiny": [1e-5]},
        )

    def test_non_finite_floats_are_rejected(self):
        with self.assertRaises(ValueError):
            render_json({"value": float("nan")})
