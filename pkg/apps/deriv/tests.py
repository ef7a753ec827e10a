# Libs
import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import basic_ssa
from apps.deriv.entities import DerivConfig
from apps.deriv.services.derivative import (
    column_diff,
    deriv_decompose,
    deriv_metric,
    deriv_ssa,
)
from apps.diagnostics.services.correlation import mean_tau, w_correlation
from apps.diagnostics.services.esprit import esprit_frequencies
from apps.oblique.entities import DecompositionKind, InnerProductSpec
from apps.oblique.services.restricted_svd import lr_svd
from apps.series.services.embedding import diff_series, embed, unembed

# Global
from common.exceptions import InvalidConfig, InvalidPartition, TooFewColumns


n = np.arange(1, 151)
PAIR = Grouping.parse("1,2;3,4")
TERMS = (np.sin(2 * np.pi * n / 10), np.sin(2 * np.pi * n / 15))


def _signal_matrix():
    return basic_ssa(sum(TERMS), 70, Grouping.parse("1-4")).grouped_matrices[0]


def _max_error(components, terms):
    values = [c.values for c in components]
    straight = max(np.max(np.abs(v - t)) for v, t in zip(values, terms))
    swapped = max(np.max(np.abs(v - t)) for v, t in zip(values, terms[::-1]))
    return min(straight, swapped)


class ColumnDiffTests(SimpleTestCase):
    def test_example(self):
        assert_allclose(column_diff([[1, 2, 4], [0, 1, 3]]), [[1, 2], [1, 2]])

    def test_trajectory_of_differences(self):
        x = np.random.default_rng(1).normal(size=30)
        assert_allclose(
            column_diff(embed(x, 10)), embed(diff_series(x), 10).entries, atol=1e-14
        )

    def test_constant_columns(self):
        assert_allclose(column_diff(np.ones((3, 4))), np.zeros((3, 3)))

    def test_too_few_columns(self):
        with self.assertRaises(TooFewColumns):
            column_diff(np.ones((3, 1)))


class DerivMetricTests(SimpleTestCase):
    def test_small_example(self):
        metric = deriv_metric(3, 1.0)
        expected = [[2, -1, 0], [-1, 3, -1], [0, -1, 2]]
        assert_allclose(metric.matrix, expected, atol=1e-14)
        self.assertEqual(metric.rank, 3)

    def test_vanishing_gamma_gives_identity(self):
        assert_allclose(deriv_metric(5, 1e-9).matrix, np.eye(5), atol=1e-14)

    def test_positive_definite(self):
        for columns, gamma in ((2, 0.5), (7, 3.0), (20, 10.0)):
            eigenvalues = np.linalg.eigvalsh(deriv_metric(columns, gamma).matrix)
            self.assertGreaterEqual(eigenvalues.min(), 1 - 1e-10)

    def test_invalid_arguments(self):
        with self.assertRaises(TooFewColumns):
            deriv_metric(1, 1.0)
        with self.assertRaises(InvalidConfig):
            deriv_metric(3, 0.0)
        with self.assertRaises(InvalidConfig):
            DerivConfig(gamma=-1.0, partition=PAIR)


class DerivDecomposeTests(SimpleTestCase):
    def test_matches_restricted_svd_with_derivative_metric(self):
        x = sum(
            amplitude * np.sin(2 * np.pi * frequency * n[:60] + 0.4)
            for amplitude, frequency in ((1.0, 0.05), (0.6, 0.13), (0.3, 0.31))
        )
        matrix = embed(x, 25).entries
        for gamma in (0.5, 2.0, 10.0):
            direct = deriv_decompose(matrix, gamma)
            metric = lr_svd(
                matrix,
                InnerProductSpec.identity(matrix.shape[0]),
                deriv_metric(matrix.shape[1], gamma),
            )
            self.assertEqual(direct.rank, metric.rank)
            assert_allclose(direct.sigmas, metric.sigmas, rtol=1e-8)
            assert_allclose(direct.left, metric.left, atol=1e-8)
            assert_allclose(direct.right, metric.right, atol=1e-8)
            self.assertEqual(direct.kind, DecompositionKind.OBLIQUE)

    def test_elementary_matrices_add_up(self):
        rng = np.random.default_rng(3)
        for gamma in (0.1, 1.0, 100.0):
            matrix = rng.normal(size=(8, 3)) @ rng.normal(size=(3, 12))
            decomposition = deriv_decompose(matrix, gamma)
            self.assertEqual(decomposition.rank, 3)
            assert_allclose(decomposition.matrix(), matrix, atol=1e-10)

    def test_high_frequency_leads(self):
        decomposition = deriv_decompose(_signal_matrix(), 10.0)
        roots = esprit_frequencies(decomposition.left[:, :2])
        assert_allclose(roots.frequencies, [0.1], atol=5e-3)


class DerivSsaTests(SimpleTestCase):
    def test_components_add_up(self):
        matrix = _signal_matrix()
        components = deriv_ssa(matrix, DerivConfig(gamma=10.0, partition=PAIR))
        total = components[0].values + components[1].values
        assert_allclose(total, unembed(matrix).values, atol=1e-10)

    def test_separates_equal_amplitudes(self):
        config = DerivConfig(gamma=10.0, partition=PAIR)
        components = deriv_ssa(_signal_matrix(), config)
        self.assertLess(_max_error(components, TERMS), 0.12)

    def test_partition_must_match_rank(self):
        with self.assertRaises(InvalidPartition):
            deriv_ssa(
                _signal_matrix(),
                DerivConfig(gamma=10.0, partition=Grouping.parse("1,2;3")),
            )


@tag("acceptance")
class EqualAmplitudeTests(SimpleTestCase):
    def setUp(self):
        self.before = basic_ssa(sum(TERMS), 70, PAIR).components
        config = DerivConfig(gamma=10.0, partition=PAIR)
        self.after = deriv_ssa(_signal_matrix(), config)

    def test_w_correlation(self):
        self.assertAlmostEqual(abs(w_correlation(*self.before, 70)), 0.92, delta=0.03)
        self.assertLess(abs(w_correlation(*self.after, 70)), 0.02)

    def test_rank_closeness(self):
        self.assertAlmostEqual(mean_tau(self.before, 70, [2, 2]), 0.3266, delta=0.01)
        self.assertLess(mean_tau(self.after, 70, [2, 2]), 1e-3)

    def test_insensitive_to_large_gamma(self):
        matrix = _signal_matrix()
        reference, *runs = (
            deriv_ssa(matrix, DerivConfig(gamma=gamma, partition=PAIR))
            for gamma in (100.0, 2.5, 5.0, 10.0)
        )
        gaps = [
            max(np.max(np.abs(a.values - b.values)) for a, b in zip(reference, run))
            for run in runs
        ]
        self.assertEqual(gaps, sorted(gaps, reverse=True))
        self.assertLess(gaps[1], 0.025)
        self.assertLess(gaps[2], 1e-2)
