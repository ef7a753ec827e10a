# Libs
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import (
    basic_ssa,
    contributions,
    group,
    nested_ossa,
    nested_partition,
    reconstruct,
    splice_refinement,
    svd_decompose,
)
from apps.oblique.entities import InnerProductSpec
from apps.oblique.services.separation import separating_metrics
from apps.series.services.embedding import embed, unembed

# Global
from common.exceptions import (
    IndexOutOfRange,
    InvalidGroupSpec,
    InvalidPartition,
    OverlappingGroups,
    ShapeMismatch,
)


N = np.arange(1, 120)
FIRST = 2 * np.sin(2 * np.pi * N / 12)
SECOND = np.sin(2 * np.pi * N / 10)


class GroupingTests(SimpleTestCase):
    def test_parse(self):
        grouping = Grouping.parse("1-4,7-11;5,6,12,13")
        self.assertEqual(
            grouping.groups, ((1, 2, 3, 4, 7, 8, 9, 10, 11), (5, 6, 12, 13))
        )
        self.assertEqual(str(Grouping.parse(" 1, 2 ; 3-4 ")), "1,2;3,4")

    def test_invalid_specs(self):
        for spec in ("", "1,,2", "a-b", "3-1", "0"):
            with self.assertRaises((InvalidGroupSpec, IndexOutOfRange)):
                Grouping.parse(spec)

    def test_overlapping(self):
        with self.assertRaises(OverlappingGroups):
            Grouping.parse("1,2;2,3")
        with self.assertRaises(OverlappingGroups):
            Grouping(((1, 1),))

    def test_constructors(self):
        self.assertEqual(Grouping.elementary(3).groups, ((1,), (2,), (3,)))
        self.assertEqual(Grouping.leading(2, 5).groups, ((1, 2), (3, 4, 5)))
        with self.assertRaises(InvalidPartition):
            Grouping.leading(4, 4)

    def test_checks(self):
        grouping = Grouping.parse("1,2;4")
        grouping.check_range(4)
        with self.assertRaises(IndexOutOfRange):
            grouping.check_range(3)
        with self.assertRaises(InvalidPartition):
            grouping.check_partition(4)


class SvdDecomposeTests(SimpleTestCase):
    def test_constant_series(self):
        decomposition = svd_decompose(embed(np.full(30, 3.0), 10))
        self.assertEqual(decomposition.rank, 1)
        self.assertAlmostEqual(decomposition.sigmas[0], 3.0 * np.sqrt(10 * 21))

    def test_sinusoid_rank(self):
        n = np.arange(1, 151)
        self.assertEqual(svd_decompose(embed(np.sin(2 * np.pi * n / 10), 70)).rank, 2)

    def test_strongly_separable_pair(self):
        decomposition = svd_decompose(embed(FIRST + SECOND, 60))
        self.assertEqual(decomposition.rank, 4)
        first, second = reconstruct(group(decomposition, Grouping.parse("1,2;3,4")))
        self.assertLess(np.max(np.abs(first.values - FIRST)), 1e-2)
        self.assertLess(np.max(np.abs(second.values - SECOND)), 1e-2)

    def test_orthonormal_vectors(self):
        matrix = np.random.default_rng(20).normal(size=(12, 9))
        decomposition = svd_decompose(matrix)
        left, right = decomposition.left, decomposition.right
        assert_allclose(left.T @ left, np.eye(9), atol=1e-12)
        assert_allclose(right.T @ right, np.eye(9), atol=1e-12)


class GroupTests(SimpleTestCase):
    def setUp(self):
        self.matrix = embed(np.random.default_rng(21).normal(size=20), 8).entries
        self.decomposition = svd_decompose(self.matrix)

    def test_elementary_grouping(self):
        elementary = Grouping.elementary(self.decomposition.rank)
        matrices = group(self.decomposition, elementary)
        for matrix in matrices:
            self.assertEqual(np.linalg.matrix_rank(matrix), 1)
        assert_allclose(sum(matrices), self.matrix, atol=1e-12)

    def test_single_group(self):
        grouping = Grouping((tuple(range(1, self.decomposition.rank + 1)),))
        (matrix,) = group(self.decomposition, grouping)
        assert_allclose(matrix, self.matrix, atol=1e-12)

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            group(self.decomposition, Grouping.parse(f"{self.decomposition.rank + 1}"))

    def test_reconstruct_shape_mismatch(self):
        with self.assertRaises(ShapeMismatch):
            reconstruct([np.zeros((3, 4)), np.zeros((4, 3))])


class BasicSsaTests(SimpleTestCase):
    def test_decomposition_identity(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            length = int(rng.integers(6, 60))
            window = int(rng.integers(2, length))
            series = rng.normal(size=length) * rng.uniform(0.1, 10)
            rank = min(window, length - window + 1)
            count = rng.integers(1, rank + 1)
            chosen = rng.permutation(np.arange(1, rank + 1))[:count]
            cut = int(rng.integers(0, chosen.size))
            groups = tuple(g for g in (chosen[:cut], chosen[cut:]) if g.size)
            result = basic_ssa(series, window, Grouping(groups))

            total = sum(c.values for c in result.components) + result.residual.values
            scale = np.linalg.norm(series)
            self.assertLess(np.linalg.norm(total - series), 1e-10 * scale)
            trajectory = embed(series, window).entries
            matrices = sum(result.grouped_matrices) + result.residual_matrix
            self.assertLess(
                np.linalg.norm(matrices - trajectory),
                1e-10 * np.linalg.norm(trajectory),
            )

    def test_single_group_is_lossless(self):
        series = np.random.default_rng(23).normal(size=40)
        result = basic_ssa(series, 15, Grouping((tuple(range(1, 16)),)))
        assert_allclose(result.components[0].values, series, atol=1e-12)
        self.assertLess(np.max(np.abs(result.residual.values)), 1e-12)

    def test_weakly_separable_pair_is_recovered(self):
        n = np.arange(1, 40)
        first = np.sin(2 * np.pi * n / 10)
        second = 0.5 * np.cos(2 * np.pi * n / 4)
        result = basic_ssa(first + second, 20, Grouping.parse("1,2;3,4"))
        assert_allclose(result.components[0].values, first, atol=1e-10)
        assert_allclose(result.components[1].values, second, atol=1e-10)

    def test_noisy_pair(self):
        noise = 0.1 * np.random.default_rng(24).standard_normal(N.size)
        result = basic_ssa(FIRST + SECOND + noise, 60, Grouping.parse("1-4"))
        signal = result.components[0].values
        rmse = np.sqrt(np.mean((signal - FIRST - SECOND) ** 2))
        self.assertLess(rmse, 0.1)
        self.assertTrue(0.06 < np.std(result.residual.values) < 0.12)


class NestedOssaTests(SimpleTestCase):
    def setUp(self):
        n = np.arange(1, 151)
        self.first = np.sin(2 * np.pi * 0.065 * n)
        self.second = 1.2 * np.sin(2 * np.pi * 0.06 * n)
        self.result = basic_ssa(self.first + self.second, 70, Grouping.parse("1-4"))
        self.matrix = self.result.grouped_matrices[0]

    def test_identity_metrics_reduce_to_ordinary_grouping(self):
        grouping = Grouping.parse("1,2;3,4")
        refined = nested_ossa(
            self.matrix,
            InnerProductSpec.identity(70),
            InnerProductSpec.identity(81),
            grouping,
        )
        expected = reconstruct(group(self.result.decomposition, grouping))
        for actual, wanted in zip(refined, expected):
            assert_allclose(actual.values, wanted.values, atol=1e-8)

    def test_refined_components_add_up(self):
        refined = nested_ossa(
            self.matrix,
            InnerProductSpec.identity(70),
            InnerProductSpec.identity(81),
            Grouping.parse("1;2-4"),
        )
        total = refined[0].values + refined[1].values
        assert_allclose(total, unembed(self.matrix).values, atol=1e-10)

    def test_separating_metrics_recover_parts(self):
        left, right = separating_metrics([self.first, self.second], 70)
        trajectory = embed(self.first + self.second, 70).entries
        first, second = nested_ossa(trajectory, left, right, Grouping.parse("3,4;1,2"))
        assert_allclose(first.values, self.first, atol=1e-8)
        assert_allclose(second.values, self.second, atol=1e-8)

    def test_grouping_must_partition(self):
        with self.assertRaises(InvalidPartition):
            nested_ossa(
                self.matrix,
                InnerProductSpec.identity(70),
                InnerProductSpec.identity(81),
                Grouping.parse("1,2"),
            )


class SupplementTests(SimpleTestCase):
    def test_contributions(self):
        decomposition = svd_decompose(embed(FIRST + SECOND, 60))
        shares = contributions(decomposition)
        self.assertAlmostEqual(shares.sum(), 1.0)
        self.assertTrue(np.all(np.diff(shares) <= 0))
        assert_allclose(shares[:2].sum(), 0.8, atol=1e-10)

    def test_nested_partition(self):
        indices, refined = nested_partition(Grouping.parse("2,8;3-6"))
        self.assertEqual(indices, (2, 3, 4, 5, 6, 8))
        self.assertEqual(refined.groups, ((1, 6), (2, 3, 4, 5)))

    def test_splice_refinement(self):
        result = basic_ssa(FIRST + SECOND, 60, Grouping.parse("1-4"))
        parts = reconstruct(group(result.decomposition, Grouping.parse("1,2;3,4")))
        spliced = splice_refinement(result, 1, parts)
        self.assertEqual(len(spliced), 2)
        total = spliced[0].values + spliced[1].values + result.residual.values
        assert_allclose(total, FIRST + SECOND, atol=1e-10)

        with self.assertRaises(ShapeMismatch):
            splice_refinement(result, 1, parts[:1])
        with self.assertRaises(IndexOutOfRange):
            splice_refinement(result, 2, parts)
