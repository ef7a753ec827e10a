# Core
import tempfile
from pathlib import Path

# Libs
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

# Apps
from apps.series.entities import TimeSeries, TrajectoryMatrix
from apps.series.services.csv_io import read_series, write_series
from apps.series.services.embedding import (
    diff_series,
    embed,
    hankelize,
    unembed,
    w_weights,
)

# Global
from common.exceptions import (
    InvalidConfig,
    NonFiniteSeries,
    SeriesTooShort,
    WindowOutOfRange,
)


class TimeSeriesTests(SimpleTestCase):
    def test_rejects_non_finite_values(self):
        with self.assertRaises(NonFiniteSeries):
            TimeSeries([1.0, np.nan, 2.0])

    def test_values_are_read_only(self):
        series = TimeSeries([1.0, 2.0, 3.0])
        with self.assertRaises(ValueError):
            series.values[0] = 5.0


class EmbedTests(SimpleTestCase):
    def test_trajectory_matrix(self):
        matrix = embed([1, 2, 3, 4, 5], 3)
        assert_array_equal(matrix.entries, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        self.assertTrue(matrix.is_hankel)
        self.assertEqual(matrix.shape, (3, 3))

    def test_constant_series_has_rank_one(self):
        matrix = embed(np.full(20, 4.0), 8)
        self.assertTrue(np.all(matrix.entries == 4.0))
        self.assertEqual(np.linalg.matrix_rank(matrix.entries), 1)

    def test_sinusoid_has_rank_two(self):
        n = np.arange(1, 151)
        matrix = embed(np.sin(2 * np.pi * n / 10), 70)
        s = np.linalg.svd(matrix.entries, compute_uv=False)
        self.assertLess(s[2] / s[0], 1e-10)
        self.assertGreater(s[1] / s[0], 0.1)

    def test_window_out_of_range(self):
        for window in (0, 1, 5, 6):
            with self.assertRaises(WindowOutOfRange):
                embed([1, 2, 3, 4, 5], window)


class HankelizeTests(SimpleTestCase):
    def test_two_by_two_mean(self):
        matrix = hankelize([[1.0, 2.0], [3.0, 4.0]])
        assert_allclose(matrix.entries, [[1.0, 2.5], [2.5, 4.0]])
        self.assertTrue(matrix.is_hankel)

    def test_hankel_input_unchanged(self):
        entries = embed([3.0, 1.0, 4.0, 1.0, 5.0, 9.0], 3).entries
        assert_array_equal(hankelize(entries).entries, entries)

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        once = hankelize(rng.normal(size=(4, 3)))
        twice = hankelize(once.entries)
        assert_allclose(twice.entries, once.entries, atol=1e-14)

    def test_orthogonal_projector(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            matrix = rng.normal(size=(5, 7))
            residual = matrix - hankelize(matrix).entries
            hankel = embed(rng.normal(size=11), 5).entries
            self.assertAlmostEqual(np.sum(residual * hankel), 0.0, places=12)


class UnembedTests(SimpleTestCase):
    def test_hankel_input(self):
        series = unembed(TrajectoryMatrix([[1, 2, 3], [2, 3, 4], [3, 4, 5]]))
        assert_allclose(series.values, [1, 2, 3, 4, 5])

    def test_non_hankel_input(self):
        assert_allclose(unembed([[1.0, 2.0], [3.0, 4.0]]).values, [1.0, 2.5, 4.0])

    def test_inverse_of_embed_is_exact(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=57)
        for window in (2, 10, 29, 56):
            assert_array_equal(unembed(embed(values, window)).values, values)


class WeightsTests(SimpleTestCase):
    def test_counts(self):
        assert_array_equal(w_weights(5, 3).weights, [1, 2, 3, 2, 1])
        assert_array_equal(w_weights(6, 2).weights, [1, 2, 2, 2, 2, 1])

    def test_total_and_symmetry(self):
        for length, window in ((10, 3), (150, 70), (119, 60), (7, 6)):
            weights = w_weights(length, window).weights
            self.assertEqual(weights.sum(), window * (length - window + 1))
            assert_array_equal(weights, weights[::-1])

    def test_window_out_of_range(self):
        with self.assertRaises(WindowOutOfRange):
            w_weights(5, 5)

    def test_w_inner_product_is_frobenius_product(self):
        rng = np.random.default_rng(4)
        y, z = rng.normal(size=(2, 40))
        weights = w_weights(40, 13).weights
        frobenius = np.sum(embed(y, 13).entries * embed(z, 13).entries)
        self.assertAlmostEqual(np.sum(weights * y * z), frobenius, places=10)


class DiffSeriesTests(SimpleTestCase):
    def test_definition(self):
        assert_array_equal(diff_series([1, 3, 6]).values, [2, 3])

    def test_too_short(self):
        with self.assertRaises(SeriesTooShort):
            diff_series([1.0])

    def test_sinusoid_amplitude(self):
        n = np.arange(1, 201)
        omega, amplitude = 0.07, 1.5
        diff = diff_series(amplitude * np.sin(2 * np.pi * omega * n + 0.3)).values
        basis = np.column_stack(
            [np.cos(2 * np.pi * omega * n[:-1]), np.sin(2 * np.pi * omega * n[:-1])]
        )
        coef = np.linalg.lstsq(basis, diff, rcond=None)[0]
        self.assertAlmostEqual(
            np.hypot(*coef), 2 * np.sin(np.pi * omega) * amplitude, places=10
        )

    def test_exponential(self):
        n = np.arange(1, 31)
        alpha = 0.02
        diff = diff_series(2.0 * np.exp(alpha * n)).values
        assert_allclose(diff, (np.exp(alpha) - 1) * 2.0 * np.exp(alpha * n[:-1]))


class CsvTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name) / "series.csv"

    def tearDown(self):
        self.directory.cleanup()

    def test_header_detection(self):
        self.path.write_text("value\n1.5\n2\n-3e-1\n")
        assert_array_equal(read_series(self.path).values, [1.5, 2.0, -0.3])

    def test_without_header(self):
        self.path.write_text("1\n2\n3\n")
        assert_array_equal(read_series(self.path).values, [1.0, 2.0, 3.0])

    def test_writer_mirrors_reader(self):
        values = np.random.default_rng(5).normal(size=25)
        write_series(self.path, values, header="x")
        assert_array_equal(read_series(self.path).values, values)

    def test_non_numeric_row(self):
        self.path.write_text("x\n1\nabc\n")
        with self.assertRaises(NonFiniteSeries):
            read_series(self.path)

    def test_missing_file(self):
        with self.assertRaises(InvalidConfig):
            read_series(self.path)
