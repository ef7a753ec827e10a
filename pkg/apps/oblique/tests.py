# Libs
import numpy as np
import scipy.linalg as spla
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

# Apps
from apps.oblique.entities import DecompositionKind, InnerProductSpec
from apps.oblique.services.metrics import (
    check_consistency,
    factor_psd,
    orthonormalizer_from_basis,
    pseudo_inverse,
)
from apps.oblique.services.restricted_svd import lr_svd, rescale_decomposition
from apps.oblique.services.separation import is_weakly_separable, separating_metrics
from apps.series.services.embedding import embed, unembed

# Global
from common.exceptions import (
    InconsistentMetric,
    NegativeEigenvalue,
    NonPositiveScale,
    NotSymmetric,
    RankDeficientBasis,
    ShapeMismatch,
)


def _identity_pair(matrix):
    rows, columns = np.shape(matrix)
    return InnerProductSpec.identity(rows), InnerProductSpec.identity(columns)


def _sinusoid(n, omega, amplitude=1.0, phase=0.0):
    return amplitude * np.sin(2 * np.pi * omega * n + phase)


class PseudoInverseTests(SimpleTestCase):
    def test_invertible(self):
        matrix = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert_allclose(pseudo_inverse(matrix), np.linalg.inv(matrix), atol=1e-14)

    def test_zero_matrix(self):
        inverse = pseudo_inverse(np.zeros((2, 3)))
        self.assertEqual(inverse.shape, (3, 2))
        self.assertFalse(np.any(inverse))

    def test_penrose_identities(self):
        rng = np.random.default_rng(10)
        matrix = rng.normal(size=(4, 2)) @ rng.normal(size=(2, 3))
        inverse = pseudo_inverse(matrix)
        assert_allclose(matrix @ inverse @ matrix, matrix, atol=1e-10)
        assert_allclose(inverse @ matrix @ inverse, inverse, atol=1e-10)
        assert_allclose((matrix @ inverse).T, matrix @ inverse, atol=1e-10)
        assert_allclose((inverse @ matrix).T, inverse @ matrix, atol=1e-10)


class FactorPsdTests(SimpleTestCase):
    def test_identity(self):
        metric = factor_psd(np.eye(2))
        self.assertEqual(metric.rank, 2)
        assert_allclose(metric.matrix, np.eye(2), atol=1e-14)

    def test_oblique_metric(self):
        matrix = np.array([[5.0, -3.0], [-3.0, 2.0]])
        metric = factor_psd(matrix)
        assert_allclose(metric.matrix, matrix, atol=1e-12)
        self.assertAlmostEqual(metric.inner(np.array([1, 2]), np.array([1, 1])), 0.0)

    def test_rank_one(self):
        v = np.array([1.0, -2.0, 0.5])
        metric = factor_psd(np.outer(v, v))
        self.assertEqual(metric.rank, 1)
        assert_allclose(metric.matrix, np.outer(v, v), atol=1e-12)

    def test_not_symmetric(self):
        with self.assertRaises(NotSymmetric):
            factor_psd([[1.0, 2.0], [0.0, 1.0]])

    def test_negative_eigenvalue(self):
        with self.assertRaises(NegativeEigenvalue):
            factor_psd(np.diag([1.0, -1.0]))

    def test_not_square(self):
        with self.assertRaises(ShapeMismatch):
            factor_psd(np.ones((2, 3)))


class OrthonormalizerTests(SimpleTestCase):
    def test_identity_basis(self):
        assert_allclose(orthonormalizer_from_basis(np.eye(2)).factor, np.eye(2))

    def test_oblique_basis(self):
        metric = orthonormalizer_from_basis([[1.0, 1.0], [2.0, 1.0]])
        assert_allclose(metric.matrix, [[5.0, -3.0], [-3.0, 2.0]], atol=1e-12)

    def test_defining_property(self):
        basis = np.random.default_rng(11).normal(size=(6, 3))
        metric = orthonormalizer_from_basis(basis)
        assert_allclose(basis.T @ metric.matrix @ basis, np.eye(3), atol=1e-10)

    def test_rank_deficient(self):
        with self.assertRaises(RankDeficientBasis):
            orthonormalizer_from_basis([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])


class ConsistencyTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(12)
        self.matrix = rng.normal(size=(6, 2)) @ rng.normal(size=(2, 5))

    def test_full_rank_metrics(self):
        residuals = check_consistency(self.matrix, *_identity_pair(self.matrix))
        self.assertEqual(tuple(residuals), (0.0, 0.0))

    def test_metrics_from_own_vectors(self):
        u, _, vt = np.linalg.svd(self.matrix)
        residuals = check_consistency(
            self.matrix,
            orthonormalizer_from_basis(u[:, :2]),
            orthonormalizer_from_basis(vt[:2].T),
        )
        self.assertLess(max(residuals), 1e-12)

    def test_orthogonal_metric(self):
        matrix = np.zeros((3, 3))
        matrix[0, :] = [1.0, 2.0, 3.0]
        residuals = check_consistency(
            matrix,
            InnerProductSpec(np.array([[0.0, 1.0, 0.0]])),
            InnerProductSpec.identity(3),
        )
        self.assertAlmostEqual(residuals.left, 1.0)
        self.assertEqual(residuals.right, 0.0)


class LrSvdTests(SimpleTestCase):
    def test_identity_metrics_match_ordinary_svd(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            matrix = rng.normal(size=(20, 15))
            decomposition = lr_svd(matrix, *_identity_pair(matrix))
            u, s, vt = np.linalg.svd(matrix, full_matrices=False)
            assert_allclose(decomposition.sigmas, s, rtol=1e-10)
            signs = np.sign(np.sum(decomposition.left * u, axis=0))
            assert_allclose(decomposition.left, u * signs, atol=1e-8)
            assert_allclose(decomposition.right, vt.T * signs, atol=1e-8)

    def test_diagonal_matrix(self):
        matrix = np.diag([2.0, 1.0])
        decomposition = lr_svd(matrix, *_identity_pair(matrix))
        assert_allclose(decomposition.sigmas, [2.0, 1.0])
        assert_allclose(np.abs(decomposition.left), np.eye(2), atol=1e-14)
        assert_allclose(np.abs(decomposition.right), np.eye(2), atol=1e-14)
        self.assertEqual(decomposition.kind, DecompositionKind.OBLIQUE)

    def test_sign_convention(self):
        matrix = np.random.default_rng(14).normal(size=(8, 6))
        decomposition = lr_svd(matrix, *_identity_pair(matrix))
        pivots = np.argmax(np.abs(decomposition.left), axis=0)
        self.assertTrue(np.all(decomposition.left[pivots, range(6)] > 0))

    def test_bi_orthogonality_and_reconstruction(self):
        rng = np.random.default_rng(15)
        matrix = rng.normal(size=(9, 3)) @ rng.normal(size=(3, 7))
        left = factor_psd(np.eye(9) + (b := rng.normal(size=(9, 9))) @ b.T)
        right = factor_psd(np.eye(7) + (c := rng.normal(size=(7, 7))) @ c.T)
        decomposition = lr_svd(matrix, left, right)

        self.assertEqual(decomposition.rank, 3)
        p, q = decomposition.left, decomposition.right
        assert_allclose(p.T @ left.matrix @ p, np.eye(3), atol=1e-8)
        assert_allclose(q.T @ right.matrix @ q, np.eye(3), atol=1e-8)
        error = np.linalg.norm(matrix - decomposition.matrix())
        self.assertLess(error / np.linalg.norm(matrix), 1e-10)

    def test_route_independence(self):
        rng = np.random.default_rng(16)
        matrix = rng.normal(size=(6, 5))
        base = factor_psd(np.eye(6) + (b := rng.normal(size=(6, 6))) @ b.T)
        rotation = spla.qr(rng.normal(size=(6, 6)))[0]
        rotated = InnerProductSpec(rotation @ base.factor)
        right = InnerProductSpec.identity(5)

        first = lr_svd(matrix, base, right)
        second = lr_svd(matrix, rotated, right)
        assert_allclose(first.sigmas, second.sigmas, rtol=1e-10)
        assert_allclose(first.left, second.left, atol=1e-8)
        assert_allclose(first.right, second.right, atol=1e-8)

    def test_separating_metrics_recover_components(self):
        n = np.arange(1, 151)
        cases = (
            (_sinusoid(n, 0.065, 2.0), _sinusoid(n, 0.06)),
            (_sinusoid(n, 0.1, 3.0, 0.4), 0.2 * np.exp(0.01 * n)),
        )
        for first, second in cases:
            left, right = separating_metrics([first, second], 70)
            decomposition = lr_svd(embed(first + second, 70).entries, left, right)
            leading = unembed(decomposition.matrix(range(2)))
            trailing = unembed(decomposition.matrix(range(2, decomposition.rank)))
            assert_allclose(leading.values, first, atol=1e-8)
            assert_allclose(trailing.values, second, atol=1e-8)

    def test_rank_above_metric_rank(self):
        matrix = np.eye(3)
        left = InnerProductSpec(np.eye(3)[:2])
        with self.assertLogs("apps.oblique.services.restricted_svd", "WARNING"):
            with self.assertRaises(InconsistentMetric):
                lr_svd(matrix, left, InnerProductSpec.identity(3))

    @override_settings(NUMERICS={"CONSISTENCY_POLICY": "fail"})
    def test_fail_policy(self):
        matrix = np.outer([1.0, 0.0, 0.0], [1.0, 1.0])
        left = InnerProductSpec(np.array([[0.0, 1.0, 0.0]]))
        with self.assertRaises(InconsistentMetric):
            lr_svd(matrix, left, InnerProductSpec.identity(2))


class RescaleTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(17)
        matrix = rng.normal(size=(7, 3)) @ rng.normal(size=(3, 6))
        self.decomposition = lr_svd(matrix, *_identity_pair(matrix))

    def test_unit_scales(self):
        ones = np.ones(self.decomposition.rank)
        rescaled = rescale_decomposition(self.decomposition, ones, ones)
        assert_allclose(rescaled.sigmas, self.decomposition.sigmas)
        assert_allclose(rescaled.left, self.decomposition.left)
        assert_allclose(rescaled.right, self.decomposition.right)

    def test_represented_matrix_is_unchanged(self):
        rescaled = rescale_decomposition(
            self.decomposition, [3.0, 0.2, 1.5], [0.5, 4.0, 1.0]
        )
        before = self.decomposition.matrix()
        difference = np.linalg.norm(rescaled.matrix() - before)
        self.assertLess(difference, 1e-12 * np.linalg.norm(before))
        p, q = rescaled.left, rescaled.right
        assert_allclose(p.T @ rescaled.left_metric.matrix @ p, np.eye(3), atol=1e-8)
        assert_allclose(q.T @ rescaled.right_metric.matrix @ q, np.eye(3), atol=1e-8)

    def test_equal_sigmas_swap(self):
        n = np.arange(1, 40)
        matrix = embed(_sinusoid(n, 0.1, 1.0, 0.3), 20).entries
        decomposition = lr_svd(matrix, *_identity_pair(matrix))
        self.assertEqual(decomposition.rank, 2)
        assert_allclose(decomposition.sigmas[0], decomposition.sigmas[1], rtol=1e-10)

        rescaled = rescale_decomposition(decomposition, [2.0, 1.0], [1.0, 1.0])
        assert_allclose(rescaled.sigmas, decomposition.sigmas[::-1] / [1.0, 2.0])
        assert_allclose(rescaled.left[:, 0], decomposition.left[:, 1])
        assert_allclose(rescaled.left[:, 1], 2.0 * decomposition.left[:, 0])

    def test_non_positive_scale(self):
        with self.assertRaises(NonPositiveScale):
            rescale_decomposition(self.decomposition, [1.0, 0.0, 1.0], [1.0] * 3)

    def test_length_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            rescale_decomposition(self.decomposition, [1.0], [1.0] * 3)


class WeakSeparabilityTests(SimpleTestCase):
    def test_orthogonal_sinusoids(self):
        n = np.arange(1, 40)
        first = embed(_sinusoid(n, 1 / 10), 20).entries
        second = embed(_sinusoid(n, 1 / 4), 20).entries
        self.assertTrue(is_weakly_separable(first, second))

    def test_close_sinusoids(self):
        n = np.arange(1, 151)
        first = embed(_sinusoid(n, 0.065), 70).entries
        second = embed(_sinusoid(n, 0.06), 70).entries
        self.assertFalse(is_weakly_separable(first, second))

    def test_separating_metrics(self):
        n = np.arange(1, 151)
        parts = [_sinusoid(n, 0.065), _sinusoid(n, 0.06)]
        left, right = separating_metrics(parts, 70)
        first, second = (embed(part, 70).entries for part in parts)
        self.assertTrue(
            is_weakly_separable(first, second, left=left, right=right, tol=1e-8)
        )
