# Core
import tempfile
from pathlib import Path

# Libs
import numpy as np
from django.test import SimpleTestCase, override_settings, tag
from numpy.testing import assert_allclose, assert_array_equal
from scipy.stats.mstats import winsorize

# Apps
from apps.decomposition.entities import Grouping
from apps.lab.entities import (
    CheckMode,
    Expectation,
    Method,
    MonteCarloSummary,
    NoiseSpec,
    PipelineSpec,
    SignalSpec,
    Term,
)
from apps.lab.services.montecarlo import (
    monte_carlo,
    parse_assignment,
    parse_sweep,
    sweep_grid,
    winsorized_mean,
)
from apps.lab.services.pipeline import pipeline_diagnostics, run_pipeline
from apps.lab.services.registry import apply_overrides, get_scenario, load_registry
from apps.lab.services.scenarios import run_scenario, scenario_series
from apps.lab.services.signals import add_noise, generate, replicate_seed
from apps.series.services.embedding import embed

# Global
from common.exceptions import (
    InvalidConfig,
    InvalidPartition,
    UnknownParameter,
    UnknownScenario,
)
from common.numerics import numerical_rank, rank_tolerance


def _rank(series, window):
    entries = embed(series, window).entries
    singular_values = np.linalg.svd(entries, compute_uv=False)
    return numerical_rank(singular_values, rank_tolerance(entries.shape))


class GenerateTests(SimpleTestCase):
    def test_single_sinusoid(self):
        series = generate(SignalSpec((Term(frequency=0.1),), 5))
        assert_allclose(series.values, np.sin(0.2 * np.pi * np.arange(1, 6)))

    def test_exponential_is_increasing(self):
        series = generate(SignalSpec((Term(rate=0.02),), 10))
        self.assertTrue(np.all(series.values > 0))
        self.assertTrue(np.all(np.diff(series.values) > 0))

    def test_sum_of_terms(self):
        spec = SignalSpec((Term(frequency=0.1), Term(frequency=1 / 15)), 150)
        n = np.arange(1, 151)
        expected = np.sin(2 * np.pi * n / 10) + np.sin(2 * np.pi * n / 15)
        assert_allclose(generate(spec).values, expected, atol=1e-12)

    def test_polynomial_term(self):
        series = generate(SignalSpec((Term(amplitude=0.5, degree=2),), 4))
        assert_allclose(series.values, [0.5, 2.0, 4.5, 8.0])

    def test_trajectory_ranks(self):
        sinusoid = generate(SignalSpec((Term(frequency=0.13, phase=0.4),), 60))
        self.assertEqual(_rank(sinusoid, 20), 2)
        alternating = generate(SignalSpec((Term(frequency=0.5, phase=0.7),), 60))
        self.assertEqual(_rank(alternating, 20), 1)
        constant = generate(SignalSpec((Term(amplitude=3.0),), 60))
        self.assertEqual(_rank(constant, 20), 1)

    def test_validation(self):
        with self.assertRaises(InvalidConfig):
            SignalSpec((Term(frequency=0.6),), 10)
        with self.assertRaises(InvalidConfig):
            SignalSpec((Term(rate=np.inf),), 10)
        with self.assertRaises(InvalidConfig):
            SignalSpec((Term(),), 0)
        with self.assertRaises(InvalidConfig):
            NoiseSpec(sigma=-1.0)


class NoiseTests(SimpleTestCase):
    def setUp(self):
        self.series = generate(SignalSpec((Term(frequency=0.1),), 50))

    def test_zero_noise_is_identity(self):
        noisy = add_noise(self.series, NoiseSpec(sigma=0.0, seed=3))
        assert_array_equal(noisy.values, self.series.values)

    def test_fixed_seed_is_reproducible(self):
        first = add_noise(self.series, NoiseSpec(sigma=1.0, seed=11))
        second = add_noise(self.series, NoiseSpec(sigma=1.0, seed=11))
        other = add_noise(self.series, NoiseSpec(sigma=1.0, seed=12))
        assert_array_equal(first.values, second.values)
        self.assertFalse(np.array_equal(first.values, other.values))

    def test_sample_variance(self):
        zeros = np.zeros(100_000)
        noisy = add_noise(zeros, NoiseSpec(sigma=2.0, seed=5))
        self.assertAlmostEqual(np.var(noisy.values) / 4.0, 1.0, delta=0.02)

    @override_settings(LAB={"BIT_GENERATOR": "LCG"})
    def test_unknown_bit_generator(self):
        with self.assertRaises(InvalidConfig):
            add_noise(self.series, NoiseSpec(sigma=1.0))

    def test_replicate_seeds(self):
        seeds = [replicate_seed(7, index) for index in range(5)]
        self.assertEqual(seeds, [replicate_seed(7, index) for index in range(5)])
        self.assertEqual(len(set(seeds)), 5)
        self.assertNotEqual(replicate_seed(8, 0), seeds[0])


class RegistryTests(SimpleTestCase):
    def test_registered_scenarios(self):
        names = set(load_registry())
        for name in (
            "demo-sep-A",
            "demo-sep-B",
            "demo-sep-C",
            "iossa-close-freq",
            "iossa-close-freq-070",
            "iossa-close-freq-080",
            "iossa-equal-amp-kappa",
            "iossa-noisy",
            "deriv-equal-amp",
        ):
            self.assertIn(name, names)

    def test_scenario_parameters(self):
        scenario = get_scenario("iossa-close-freq")
        self.assertEqual(scenario.method, Method.IOSSA)
        self.assertEqual(scenario.params["window"], 70)
        self.assertEqual(scenario.params["amplitude1"], 1.0)
        self.assertEqual(scenario.expected["iterations"].mode, CheckMode.REL)
        self.assertAlmostEqual(get_scenario("demo-sep-C").params["omega2"], 1 / 13)

    def test_unknown_scenario(self):
        with self.assertRaises(UnknownScenario):
            get_scenario("no-such-scenario")

    def test_overrides(self):
        params = apply_overrides({"window": 70}, {"window": "48", "sigma": "0.5"})
        self.assertEqual(params, {"window": 48, "sigma": 0.5})
        with self.assertRaises(UnknownParameter):
            apply_overrides({}, {"delta": "1"})
        with self.assertRaises(InvalidConfig):
            apply_overrides({}, {"window": "wide"})

    def test_schema_version(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / "registry.toml"
            path.write_text('schema_version = 2\n[scenarios]\n')
            with self.assertRaises(InvalidConfig):
                load_registry(path)

    def test_unreadable_registry(self):
        with tempfile.TemporaryDirectory() as folder:
            with self.assertRaises(InvalidConfig):
                load_registry(Path(folder) / "missing.toml")
            path = Path(folder) / "broken.toml"
            path.write_text("schema_version = \n")
            with self.assertRaises(InvalidConfig):
                load_registry(path)


class ExpectationTests(SimpleTestCase):
    def test_modes(self):
        self.assertTrue(Expectation(0.92, CheckMode.ABS, 0.03).holds(0.9))
        self.assertFalse(Expectation(0.92, CheckMode.ABS, 0.03).holds(0.8))
        self.assertTrue(Expectation(113, CheckMode.REL, 0.3).holds(140))
        self.assertFalse(Expectation(113, CheckMode.REL, 0.3).holds(150))
        self.assertTrue(Expectation(0.02, CheckMode.ABS_UPPER).holds(-0.01))
        self.assertFalse(Expectation(0.02, CheckMode.ABS_UPPER).holds(-0.03))
        self.assertTrue(Expectation(1, CheckMode.LOWER).holds(1.0))
        self.assertFalse(Expectation(1, CheckMode.LOWER).holds(None))
        self.assertFalse(Expectation(1, CheckMode.LOWER).holds(float("nan")))


class PipelineTests(SimpleTestCase):
    def setUp(self):
        self.series = scenario_series(get_scenario("iossa-close-freq-080").params)

    def test_spec_validation(self):
        pair = Grouping.parse("1,2;3,4")
        with self.assertRaises(InvalidConfig):
            PipelineSpec(window=70, method=Method.BASIC, groups=pair, gamma=1.0)
        with self.assertRaises(InvalidConfig):
            PipelineSpec(window=70, method=Method.DERIV, groups=pair)
        with self.assertRaises(InvalidConfig):
            PipelineSpec(
                window=70, method=Method.DERIV, groups=pair, gamma=1.0, kappa=2.0
            )
        with self.assertRaises(InvalidConfig):
            PipelineSpec(window=70, method=Method.BASIC, groups=pair, partition=pair)

    def test_basic_pipeline(self):
        pair = Grouping.parse("1,2;3,4")
        spec = PipelineSpec(window=70, method=Method.BASIC, groups=pair)
        outcome = run_pipeline(self.series, spec)
        total = sum(c.values for c in outcome.components) + outcome.residual.values
        assert_allclose(total, self.series.values, atol=1e-10)
        diagnostics = pipeline_diagnostics(outcome, frequencies=True)
        self.assertIsNone(diagnostics.wcor_before)
        self.assertIsNone(diagnostics.iterations)
        self.assertEqual(len(diagnostics.frequencies), 2)

    def test_nested_pipeline(self):
        spec = PipelineSpec(
            window=70,
            method=Method.IOSSA,
            groups=Grouping.parse("1,2;3,4"),
            max_iter=100,
        )
        outcome = run_pipeline(self.series, spec)
        total = sum(c.values for c in outcome.components) + outcome.residual.values
        assert_allclose(total, self.series.values, atol=1e-8)

        diagnostics = pipeline_diagnostics(outcome, frequencies=True)
        self.assertTrue(diagnostics.converged)
        self.assertLess(abs(diagnostics.lr_wcor.values[0, 1]), 1e-8)
        assert_allclose(sorted(diagnostics.frequencies), [0.06, 0.08], atol=1e-4)
        self.assertEqual(len(diagnostics.tau_before), 2)

    def test_explicit_partition(self):
        spec = PipelineSpec(
            window=70,
            method=Method.DERIV,
            groups=Grouping.parse("1-4"),
            partition=Grouping.parse("1,2;3,4"),
            gamma=10.0,
        )
        outcome = run_pipeline(self.series, spec)
        self.assertEqual(len(outcome.components), 2)
        self.assertEqual(len(outcome.ssa.components), 1)

    def test_partition_must_cover_refined_components(self):
        spec = PipelineSpec(
            window=70,
            method=Method.DERIV,
            groups=Grouping.parse("1-4"),
            partition=Grouping.parse("1,2"),
            gamma=10.0,
        )
        with self.assertRaises(InvalidPartition):
            run_pipeline(self.series, spec)


class ScenarioTests(SimpleTestCase):
    def test_strong_separability_demo(self):
        result = run_scenario("demo-sep-A")
        self.assertTrue(result.passed)
        self.assertLess(result.metrics["cross_block"], 0.05)
        self.assertEqual(len(result.diagnostics.wcor_after), 4)

    def test_close_periods_stay_mixed(self):
        result = run_scenario("demo-sep-C")
        self.assertTrue(result.passed)
        self.assertGreater(result.metrics["cross_block"], 0.5)
        self.assertEqual([check.metric for check in result.checks], ["cross_block"])

    def test_noise_free_runs_agree(self):
        first = run_scenario("deriv-equal-amp")
        second = run_scenario("deriv-equal-amp")
        self.assertEqual(first.metrics, second.metrics)

    def test_overrides_reach_pipeline(self):
        result = run_scenario("demo-sep-A", overrides={"window": "48"})
        self.assertEqual(result.params["window"], 48)
        self.assertEqual(result.outcome.spec.window, 48)

    def test_missed_expectation_fails(self):
        result = run_scenario(
            "demo-sep-A", overrides={"omega2": str(1 / 13), "sigma": "4"}
        )
        self.assertFalse(result.passed)
        self.assertFalse(result.checks[0].passed)


@tag("acceptance")
class ScenarioAcceptanceTests(SimpleTestCase):
    def test_reproduced_scenarios(self):
        for name in (
            "iossa-close-freq",
            "iossa-close-freq-070",
            "iossa-close-freq-080",
            "iossa-equal-amp-kappa",
            "deriv-equal-amp",
        ):
            with self.subTest(name):
                result = run_scenario(name)
                failed = [check.metric for check in result.checks if not check.passed]
                self.assertEqual(failed, [])


class WinsorizeTests(SimpleTestCase):
    def test_single_replicate(self):
        self.assertEqual(winsorized_mean([3.25], 0.0), 3.25)

    def test_clips_tails(self):
        values = np.arange(20, dtype=float)
        values[-1] = 1000.0
        expected = np.mean(np.r_[1, np.arange(1, 19), 18])
        self.assertAlmostEqual(winsorized_mean(values, 0.05), expected)

    def test_idempotent(self):
        values = np.random.default_rng(3).standard_cauchy(200)
        clipped = np.asarray(winsorize(np.sort(values), limits=(0.05, 0.05)))
        self.assertAlmostEqual(
            winsorized_mean(clipped, 0.05), winsorized_mean(values, 0.05), places=12
        )

    def test_mean_lies_within_range(self):
        values = np.random.default_rng(4).exponential(size=50)
        summary = MonteCarloSummary("x", values, winsorized_mean(values, 0.1), 0.1)
        self.assertEqual(summary.replicates, 50)
        self.assertGreaterEqual(summary.winsorized_mean, values.min())
        self.assertLessEqual(summary.winsorized_mean, values.max())
        with self.assertRaises(InvalidConfig):
            MonteCarloSummary("x", values, 0.0, 0.5)

    def test_empty(self):
        self.assertTrue(np.isnan(winsorized_mean([], 0.05)))


class SweepTests(SimpleTestCase):
    def test_range(self):
        name, values = parse_sweep("omega1=0.03:0.1:0.002")
        self.assertEqual(name, "omega1")
        self.assertEqual(len(values), 36)
        self.assertAlmostEqual(values[0], 0.03)
        self.assertAlmostEqual(values[-1], 0.1)

    def test_list_and_skip(self):
        sweep = dict(
            [parse_sweep("omega1=0.05,0.06,0.07"), parse_sweep("window=60,70")]
        )
        points = sweep_grid(sweep, skip=[("omega1", 0.06)])
        self.assertEqual(len(points), 4)
        self.assertNotIn(0.06, [point["omega1"] for point in points])
        self.assertIsInstance(points[0]["window"], int)

    def test_errors(self):
        for content in ("omega1", "omega1=0.1:0.05:0.01", "omega1=a:b:c"):
            with self.assertRaises(InvalidConfig):
                parse_sweep(content)
        with self.assertRaises(UnknownParameter):
            parse_sweep("delta=1,2")
        with self.assertRaises(InvalidConfig):
            sweep_grid({"omega1": [0.06]}, skip=[("omega1", 0.06)])
        self.assertEqual(parse_assignment(" sigma = 2 "), ("sigma", "2"))


class MonteCarloTests(SimpleTestCase):
    def _run(self, **kwargs):
        return monte_carlo(
            "deriv-equal-amp",
            3,
            7,
            {"sigma": [0.3]},
            winsorize_fraction=0.0,
            **kwargs,
        )

    def test_deterministic_and_independent_of_workers(self):
        first, second = self._run(), self._run(workers=2)
        self.assertEqual(len(first), 1)
        self.assertEqual(first[0].failures, 0)
        for name, summary in first[0].summaries.items():
            other = second[0].summaries[name]
            assert_array_equal(summary.per_replicate, other.per_replicate)
            self.assertEqual(summary.winsorized_mean, other.winsorized_mean)

    def test_frequency_errors_are_recorded(self):
        point = self._run()[0]
        self.assertEqual(point.params, {"sigma": 0.3})
        self.assertEqual(point.replicates, 3)
        for name in ("sq_error_omega1", "sq_error_omega2"):
            self.assertEqual(point.summaries[name].replicates, 3)
            self.assertLess(point.rmse(name), 0.01)

    def test_needs_replicates(self):
        with self.assertRaises(InvalidConfig):
            monte_carlo("deriv-equal-amp", 0, 7, {"sigma": [0.3]})


@tag("slow")
class FrequencyErrorSweepTests(SimpleTestCase):
    def test_errors_grow_near_equal_frequencies(self):
        points = monte_carlo(
            "iossa-noisy", 20, 11, {"omega1": [0.04, 0.058]}, workers=4
        )
        far, near = (point.rmse("sq_error_omega1") for point in points)
        self.assertLess(far, near)
        iterations = points[0].summaries["iterations"]
        self.assertEqual(iterations.replicates + points[0].failures, 20)

    def test_distinct_frequencies_are_estimated_accurately(self):
        points = monte_carlo(
            "iossa-noisy",
            100,
            7,
            {"omega1": [0.04, 0.072, 0.056, 0.058]},
            workers=4,
        )
        rmse = {p.params["omega1"]: p.rmse("sq_error_omega1") for p in points}
        far = max(rmse[0.04], rmse[0.072])
        near = min(rmse[0.056], rmse[0.058])
        self.assertLess(5 * far, near)

    def test_iterations_at_moderate_separation(self):
        (point,) = monte_carlo("iossa-noisy", 100, 7, {"omega1": [0.07]}, workers=4)
        iterations = point.summaries["iterations"]
        self.assertEqual(iterations.replicates + point.failures, 100)
        self.assertLessEqual(iterations.winsorized_mean, 80)
        self.assertGreaterEqual(iterations.winsorized_mean, 16)
        self.assertLessEqual(np.median(iterations.per_replicate), 48)
