# Libs
import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose
from rich.console import Console
from rich.table import Table

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import basic_ssa, group, svd_decompose
from apps.diagnostics.entities import CorrelationMatrix, SignalRoots
from apps.diagnostics.services.correlation import (
    cross_block_max,
    f_correlation,
    lr_w_correlation,
    max_f_correlation,
    mean_tau,
    tau_rank_closeness,
    w_correlation,
    w_correlation_matrix,
)
from apps.diagnostics.services.esprit import (
    component_frequencies,
    dominant_frequency,
    esprit_frequencies,
    scatter_pairs,
)
from apps.diagnostics.services.heatmap import render_heatmap
from apps.iossa.entities import IterOSSAConfig
from apps.iossa.services.iteration import iterate_ossa
from apps.oblique.entities import InnerProductSpec
from apps.oblique.services.metrics import factor_psd
from apps.oblique.services.restricted_svd import lr_svd
from apps.series.services.embedding import embed

# Global
from common.exceptions import RankDeficientBasis, ShapeMismatch, ZeroNorm


def _sine(frequency, length, amplitude=1.0, phase=0.0):
    n = np.arange(1, length + 1)
    return amplitude * np.sin(2 * np.pi * frequency * n + phase)


def _leading_vectors(series, window, rank):
    u, _, _ = np.linalg.svd(embed(series, window).entries, full_matrices=False)
    return u[:, :rank]


class CorrelationMatrixTests(SimpleTestCase):
    def test_diagonal_and_labels(self):
        matrix = CorrelationMatrix(np.array([[0.9, 0.2], [0.2, 1.1]]))
        assert_allclose(matrix.values, [[1.0, 0.2], [0.2, 1.0]])
        self.assertEqual(matrix.labels, ["F1", "F2"])
        self.assertEqual(matrix.as_rows()[1], ["F2", 0.2, 1.0])

    def test_rejects_asymmetric(self):
        with self.assertRaises(ShapeMismatch):
            CorrelationMatrix(np.array([[1.0, 0.5], [0.1, 1.0]]))
        with self.assertRaises(ShapeMismatch):
            CorrelationMatrix(np.eye(2), labels=["a"])


class WCorrelationTests(SimpleTestCase):
    def test_self_and_opposite(self):
        x = np.random.default_rng(1).normal(size=40)
        self.assertAlmostEqual(w_correlation(x, x, 10), 1.0, places=12)
        self.assertAlmostEqual(w_correlation(x, -x, 10), -1.0, places=12)

    def test_matches_frobenius_cosine_of_embeddings(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x, y = rng.normal(size=(2, 50))
            window = int(rng.integers(2, 49))
            rho = w_correlation(x, y, window)
            self.assertLessEqual(abs(rho), 1.0)
            self.assertAlmostEqual(rho, w_correlation(y, x, window), places=14)
            self.assertAlmostEqual(
                rho,
                f_correlation(embed(x, window).entries, embed(y, window).entries),
                places=12,
            )

    def test_zero_norm_and_length(self):
        with self.assertRaises(ZeroNorm):
            w_correlation(np.zeros(10), np.ones(10), 4)
        with self.assertRaises(ShapeMismatch):
            w_correlation(np.ones(10), np.ones(11), 4)

    def test_single_component_matrix(self):
        matrix = w_correlation_matrix([_sine(0.1, 30)], 10)
        assert_allclose(matrix.values, [[1.0]])

    def test_matrix_of_ragged_components(self):
        with self.assertRaises(ShapeMismatch):
            w_correlation_matrix([_sine(0.1, 30), _sine(0.2, 31)], 10)
        with self.assertRaises(ShapeMismatch):
            w_correlation_matrix([], 10)

    def test_strong_separability_gives_block_pattern(self):
        series = _sine(1 / 12, 119, 2.0) + _sine(1 / 10, 119)
        result = basic_ssa(series, 60, Grouping.elementary(4))
        matrix = w_correlation_matrix(result.components, 60)
        self.assertLess(cross_block_max(matrix, [0, 1], [2, 3]), 0.05)

    def test_equal_amplitudes_leave_pairs_undetermined(self):
        series = _sine(1 / 12, 119) + _sine(1 / 10, 119)
        sigmas = svd_decompose(embed(series, 60)).sigmas
        assert_allclose(sigmas[1:4] / sigmas[0], 1.0, rtol=1e-8)

    def test_cross_block_max(self):
        matrix = CorrelationMatrix(
            np.array([[1, 0.1, -0.7], [0.1, 1, 0.2], [-0.7, 0.2, 1]])
        )
        self.assertAlmostEqual(cross_block_max(matrix, [0], [1, 2]), 0.7)
        self.assertEqual(cross_block_max(matrix, [], [1]), 0.0)


class FCorrelationTests(SimpleTestCase):
    def test_self_and_orthogonal_components(self):
        a = np.random.default_rng(3).normal(size=(6, 5))
        self.assertAlmostEqual(f_correlation(a, a), 1.0, places=12)

        decomposition = svd_decompose(a)
        first, second = decomposition.elementary(0), decomposition.elementary(1)
        self.assertLess(abs(f_correlation(first, second)), 1e-12)
        self.assertLess(max_f_correlation(decomposition), 1e-12)

    def test_zero_matrix(self):
        with self.assertRaises(ZeroNorm):
            f_correlation(np.zeros((2, 2)), np.eye(2))


class LRWCorrelationTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(4)
        self.matrix = rng.normal(size=(8, 3)) @ rng.normal(size=(3, 7))
        extra = rng.normal(size=(7, 7))
        self.left = InnerProductSpec.identity(8)
        self.right = factor_psd(np.eye(7) + extra @ extra.T)
        self.decomposition = lr_svd(self.matrix, self.left, self.right)

    def test_components_of_one_decomposition_are_orthogonal(self):
        first = self.decomposition.elementary(0)
        second = self.decomposition.elementary(1)
        rho = lr_w_correlation(first, second, self.left, self.right)
        self.assertLess(abs(rho), 1e-10)

    def test_identity_metrics_reduce_to_f_correlation(self):
        rng = np.random.default_rng(5)
        a, b = rng.normal(size=(2, 4, 5))
        rho = lr_w_correlation(
            a, b, InnerProductSpec.identity(4), InnerProductSpec.identity(5)
        )
        self.assertAlmostEqual(rho, f_correlation(a, b), places=14)

    def test_left_orthogonality_with_identity_left_metric(self):
        first = self.decomposition.elementary(0)
        second = self.decomposition.elementary(1)
        self.assertLess(abs(f_correlation(first, second)), 1e-10)
        self.assertAlmostEqual(
            np.linalg.norm(first + second) ** 2,
            np.linalg.norm(first) ** 2 + np.linalg.norm(second) ** 2,
            delta=1e-10 * np.linalg.norm(self.matrix) ** 2,
        )
        self.assertLess(max_f_correlation(self.decomposition), 1e-10)

    def test_metric_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            lr_w_correlation(
                self.matrix, self.matrix, self.left, InnerProductSpec.identity(6)
            )


class TauTests(SimpleTestCase):
    def test_sinusoid_has_rank_two(self):
        self.assertLess(tau_rank_closeness(_sine(0.1, 60, phase=0.3), 20, 2), 1e-10)
        self.assertGreater(tau_rank_closeness(_sine(0.1, 60, phase=0.3), 20, 1), 0.1)

    def test_monotone_in_rank(self):
        x = np.random.default_rng(6).normal(size=30)
        values = [tau_rank_closeness(x, 10, r) for r in range(1, 11)]
        self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))
        self.assertLess(values[-1], 1e-12)

    def test_mean_and_errors(self):
        components = [_sine(0.1, 60), np.random.default_rng(7).normal(size=60)]
        expected = 0.5 * tau_rank_closeness(components[1], 20, 2)
        self.assertAlmostEqual(mean_tau(components, 20, [2, 2]), expected, places=10)
        with self.assertRaises(ShapeMismatch):
            mean_tau(components, 20, [2])
        with self.assertRaises(ZeroNorm):
            tau_rank_closeness(np.zeros(30), 10, 1)


class EspritTests(SimpleTestCase):
    def test_single_sinusoid(self):
        roots = esprit_frequencies(_leading_vectors(_sine(0.1, 100), 50, 2))
        self.assertEqual(len(roots.roots), 2)
        assert_allclose(roots.frequencies, [0.1], atol=1e-6)
        assert_allclose(roots.moduli, [1.0], atol=1e-6)

    def test_exponential(self):
        series = np.exp(0.02 * np.arange(1, 61))
        roots = esprit_frequencies(_leading_vectors(series, 30, 1))
        assert_allclose(roots.frequencies, [0.0], atol=1e-12)
        assert_allclose(roots.moduli, [np.exp(0.02)], atol=1e-6)

    def test_two_sinusoids(self):
        series = _sine(1 / 12, 119, 2.0) + _sine(1 / 10, 119, phase=0.5)
        roots = esprit_frequencies(_leading_vectors(series, 60, 4))
        assert_allclose(roots.frequencies, [1 / 12, 1 / 10], atol=1e-6)

    def test_component_frequencies(self):
        roots = component_frequencies(_sine(0.07, 120, 3.0, 1.0), 60, 2)
        assert_allclose(roots.frequencies, [0.07], atol=1e-6)

    def test_rank_deficient_basis(self):
        with self.assertRaises(RankDeficientBasis):
            esprit_frequencies(np.eye(3))
        with self.assertRaises(RankDeficientBasis):
            esprit_frequencies(np.ones((10, 2)))

    def test_roots_collapse_conjugates(self):
        roots = SignalRoots.from_roots(
            [np.exp(-0.2j * np.pi), 0.9, np.exp(0.2j * np.pi)]
        )
        assert_allclose(roots.frequencies, [0.0, 0.1])
        assert_allclose(roots.moduli, [0.9, 1.0])
        self.assertEqual(len(roots.roots), 3)

    def test_dominant_frequency(self):
        roots = SignalRoots.from_roots(
            [np.exp(-0.2j * np.pi), 0.5, np.exp(0.2j * np.pi)]
        )
        self.assertAlmostEqual(dominant_frequency(roots), 0.1)
        sinusoid = component_frequencies(_sine(0.07, 120, 3.0, 1.0), 60, 2)
        self.assertAlmostEqual(dominant_frequency(sinusoid), 0.07, places=6)


class ScatterPairsTests(SimpleTestCase):
    def test_sine_cosine_pair_visits_period_positions(self):
        n = np.arange(24)
        angle = 2 * np.pi * n / 8
        points = scatter_pairs([np.sin(angle), np.cos(angle)])[0]
        self.assertEqual(len({tuple(p) for p in np.round(points, 8)}), 8)
        assert_allclose(np.hypot(points[:, 0], points[:, 1]), 1.0)

    def test_identical_vectors_lie_on_diagonal(self):
        v = np.random.default_rng(8).normal(size=10)
        pairs = scatter_pairs([v, v, v])
        self.assertEqual(len(pairs), 2)
        assert_allclose(pairs[0][:, 0], pairs[0][:, 1])

    def test_needs_two_vectors(self):
        with self.assertRaises(ShapeMismatch):
            scatter_pairs([np.ones(3)])


class HeatmapTests(SimpleTestCase):
    def test_render(self):
        matrix = CorrelationMatrix(np.array([[1.0, -0.25], [-0.25, 1.0]]), ["a", "b"])
        table = render_heatmap(matrix)
        self.assertIsInstance(table, Table)
        self.assertEqual(len(table.columns), 3)

        console = Console(width=40, record=True, color_system=None)
        console.print(table)
        text = console.export_text()
        self.assertIn("-0.25", text)
        self.assertIn("1.00", text)


@tag("acceptance")
class CloseFrequencyMeasuresTests(SimpleTestCase):
    """Separability measures before and after refining close frequencies."""

    def setUp(self):
        self.first = _sine(0.065, 150)
        self.second = _sine(0.06, 150, 1.2)
        pairs = Grouping.parse("1,2;3,4")
        self.before = basic_ssa(self.first + self.second, 70, pairs)
        signal = basic_ssa(self.first + self.second, 70, Grouping.parse("1-4"))
        self.report = iterate_ossa(
            signal.grouped_matrices[0], IterOSSAConfig(partition=pairs, max_iter=1000)
        )

    def test_w_correlations(self):
        before = w_correlation(*self.before.components, 70)
        after = w_correlation(*self.report.components, 70)
        self.assertAlmostEqual(abs(before), 0.08, delta=0.02)
        self.assertAlmostEqual(after, -0.44, delta=0.03)

    def test_lr_w_correlation_vanishes(self):
        left, right = self.report.final_metrics
        first, second = group(self.report.decomposition, self.report.partition)
        self.assertLess(abs(lr_w_correlation(first, second, left, right)), 1e-8)

    def test_rank_closeness(self):
        self.assertAlmostEqual(
            mean_tau(self.before.components, 70, [2, 2]), 0.06, delta=0.01
        )
        self.assertLess(mean_tau(self.report.components, 70, [2, 2]), 1e-4)

    def test_frequencies_of_refined_groups(self):
        left = self.report.decomposition.left
        estimates = sorted(
            esprit_frequencies(left[:, indices]).frequencies[0]
            for indices in self.report.partition.zero_based()
        )
        assert_allclose(estimates, [0.06, 0.065], atol=1e-4)
