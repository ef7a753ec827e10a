# Libs
import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import basic_ssa, group
from apps.iossa.entities import IterOSSAConfig, MetricPair
from apps.iossa.services.iteration import (
    iterate_ossa,
    space_projectors,
    update_metrics,
)
from apps.oblique.entities import InnerProductSpec
from apps.oblique.services.restricted_svd import lr_svd
from apps.oblique.services.separation import separating_metrics
from apps.series.services.embedding import embed, unembed

# Global
from common.exceptions import InvalidConfig, InvalidPartition


n = np.arange(1, 151)
PAIR = Grouping.parse("1,2;3,4")


def _terms(omega1, amplitude=1.2, omega2=0.06):
    return np.sin(2 * np.pi * omega1 * n), amplitude * np.sin(2 * np.pi * omega2 * n)


def _signal_matrix(omega1, amplitude=1.2):
    first, second = _terms(omega1, amplitude)
    return basic_ssa(first + second, 70, Grouping.parse("1-4")).grouped_matrices[0]


def _identity(matrix):
    return (
        InnerProductSpec.identity(matrix.shape[0]),
        InnerProductSpec.identity(matrix.shape[1]),
    )


def _max_error(components, terms):
    """Largest deviation under the better of the two component orders."""
    values = [c.values for c in components]
    straight = max(np.max(np.abs(v - t)) for v, t in zip(values, terms))
    swapped = max(np.max(np.abs(v - t)) for v, t in zip(values, terms[::-1]))
    return min(straight, swapped)


class ConfigTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(InvalidPartition):
            IterOSSAConfig(partition=Grouping.parse("1;2;3"))
        with self.assertRaises(InvalidConfig):
            IterOSSAConfig(partition=PAIR, epsilon=0)
        with self.assertRaises(InvalidConfig):
            IterOSSAConfig(partition=PAIR, max_iter=0)
        with self.assertRaises(InvalidConfig):
            IterOSSAConfig(partition=PAIR, kappa=1.0)


class UpdateMetricsTests(SimpleTestCase):
    def test_separating_decomposition_is_fixed_point(self):
        first, second = _terms(0.065)
        matrix = embed(first + second, 70).entries
        decomposition = lr_svd(matrix, *separating_metrics([second, first], 70))
        matrices = group(decomposition, PAIR)
        col, row, _ = space_projectors(matrix)

        update = update_metrics(matrices, PAIR, col, row)
        refined = group(lr_svd(matrix, update.left, update.right), PAIR)
        for before, after in zip(matrices, refined):
            assert_allclose(after, before, atol=1e-8)
        self.assertFalse(update.corrected)

    def test_kappa_not_triggered(self):
        first, second = 10.0 * _terms(0.08)[0], _terms(0.08)[1] / 1.2
        ssa = basic_ssa(first + second, 70, Grouping.parse("1-4"))
        matrix = ssa.grouped_matrices[0]
        matrices = group(lr_svd(matrix, *_identity(matrix)), PAIR)
        col, row, _ = space_projectors(matrix)

        plain = update_metrics(matrices, PAIR, col, row)
        kappa = update_metrics(matrices, PAIR, col, row, kappa=2.0)
        self.assertFalse(kappa.corrected)
        assert_allclose(kappa.left.matrix, plain.left.matrix, atol=1e-12)
        assert_allclose(kappa.right.matrix, plain.right.matrix, atol=1e-12)

    def test_sigma_correction_separates_sigmas(self):
        first, second = _terms(0.065, amplitude=1.0)
        matrices = [embed(first, 70).entries, embed(second, 70).entries]
        matrix = matrices[0] + matrices[1]
        col, row, _ = space_projectors(matrix)

        update = update_metrics(matrices, PAIR, col, row, kappa=2.0)
        self.assertTrue(update.corrected)
        decomposition = lr_svd(matrix, update.left, update.right)
        sigmas = decomposition.sigmas
        self.assertGreater(sigmas[1], sigmas[2])
        assert_allclose(sigmas[1] / sigmas[2], 2.0, rtol=1e-8)
        leading = unembed(decomposition.matrix(range(2)))
        assert_allclose(leading.values, first, atol=1e-8)


class IterateOssaTests(SimpleTestCase):
    def test_close_frequencies_are_separated(self):
        matrix = _signal_matrix(0.065)
        report = iterate_ossa(matrix, IterOSSAConfig(partition=PAIR, max_iter=1000))

        self.assertTrue(report.converged)
        self.assertLess(report.history[-1], 1e-10)
        self.assertEqual(len(report.history), report.iterations)
        self.assertLess(_max_error(report.components, _terms(0.065)), 1e-2)

        total = report.components[0].values + report.components[1].values
        assert_allclose(total, unembed(matrix).values, atol=1e-10)

    def test_fixed_point_takes_one_iteration(self):
        first, second = _terms(0.065)
        matrix = embed(first + second, 70).entries
        metrics = MetricPair(*separating_metrics([second, first], 70))
        report = iterate_ossa(
            matrix, IterOSSAConfig(partition=PAIR, initial_metrics=metrics)
        )
        self.assertEqual(report.iterations, 1)
        self.assertTrue(report.converged)
        assert_allclose(report.components[0].values, second, atol=1e-8)
        assert_allclose(report.components[1].values, first, atol=1e-8)

    def test_iteration_cap(self):
        report = iterate_ossa(
            _signal_matrix(0.065), IterOSSAConfig(partition=PAIR, max_iter=3)
        )
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 3)
        self.assertEqual(len(report.history), 3)

    def test_partition_must_match_rank(self):
        with self.assertRaises(InvalidPartition):
            iterate_ossa(
                _signal_matrix(0.065),
                IterOSSAConfig(partition=Grouping.parse("1,2;3")),
            )

    def test_nested_partition_order(self):
        matrix = _signal_matrix(0.07)
        report = iterate_ossa(
            matrix, IterOSSAConfig(partition=Grouping.parse("3,4;1,2"), max_iter=1000)
        )
        self.assertTrue(report.converged)
        self.assertLess(_max_error(report.components, _terms(0.07)), 1e-2)


@tag("acceptance")
class IterationCountTests(SimpleTestCase):
    def _iterations(self, omega1, amplitude=1.2, kappa=None):
        report = iterate_ossa(
            _signal_matrix(omega1, amplitude),
            IterOSSAConfig(partition=PAIR, max_iter=1000, kappa=kappa),
        )
        self.assertTrue(report.converged)
        self.assertLess(
            _max_error(report.components, _terms(omega1, amplitude)), 1e-2
        )
        return report.iterations

    def test_counts_decrease_with_frequency_gap(self):
        counts = [self._iterations(omega) for omega in (0.065, 0.07, 0.08)]
        for count, expected in zip(counts, (113, 26, 6)):
            self.assertGreaterEqual(count, 0.7 * expected)
            self.assertLessEqual(count, 1.3 * expected)
        self.assertGreater(counts[0], counts[1])
        self.assertGreater(counts[1], counts[2])

    def test_equal_amplitudes_with_sigma_correction(self):
        count = self._iterations(0.065, amplitude=1.0, kappa=2.0)
        self.assertGreaterEqual(count, 0.7 * 191)
        self.assertLessEqual(count, 1.3 * 191)


class ReconstructionIdentityTests(SimpleTestCase):
    def test_every_iteration_adds_up(self):
        matrix = _signal_matrix(0.08)
        target = unembed(matrix).values
        for cap in (1, 2, 4):
            report = iterate_ossa(matrix, IterOSSAConfig(partition=PAIR, max_iter=cap))
            total = sum(c.values for c in report.components)
            assert_allclose(total, target, atol=1e-10)
