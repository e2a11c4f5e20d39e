import math

import numpy as np
from django.test import SimpleTestCase

from groenewold.exceptions import InsufficientTruncationError, NumericalError, PrecisionLimitError
from groenewold.services import quantizer, spectra
from groenewold.services.densities import GaussianDensity


class GaussianSpectrumTests(SimpleTestCase):
    def test_closed_form_values(self):
        np.testing.assert_allclose(spectra.gaussian_eigenvalues(3.0, 2), [0.5, 0.25, 0.125], atol=1e-15)
        np.testing.assert_allclose(spectra.gaussian_eigenvalues(1.0, 2), [1.0, 0.0, 0.0], atol=1e-15)
        self.assertAlmostEqual(spectra.gaussian_eigenvalue(1, 1.0 / 3.0), -0.75, places=14)

    def test_trace_and_purity(self):
        for s in (0.3, 2.0, 5.0):
            with self.subTest(s=s):
                n_max = spectra.required_n_max("gaussian", s)
                values = spectra.gaussian_eigenvalues(s, n_max)
                self.assertAlmostEqual(float(np.sum(values)) + spectra.gaussian_tail(s, n_max), 1.0, places=10)
                self.assertAlmostEqual(float(np.sum(values ** 2)), 1.0 / s, places=10)

    def test_required_truncation(self):
        self.assertEqual(spectra.required_n_max("gaussian", 1.0), 1)
        self.assertEqual(spectra.required_n_max("gaussian", 3.0), 40)

    def test_invalid_s_is_rejected(self):
        with self.assertRaises(ValueError):
            spectra.gaussian_eigenvalues(0.0, 3)


class UniformSpectrumTests(SimpleTestCase):
    def test_ground_state(self):
        self.assertAlmostEqual(spectra.uniform_eigenvalue(0, 2.0), 1.0 - math.exp(-2.0), places=10)

    def test_quadrature_agrees_with_series(self):
        np.testing.assert_allclose(
            spectra.uniform_eigenvalues(2.0, 30), spectra.uniform_eigenvalues_series(2.0, 30), atol=1e-10
        )

    def test_series_refuses_large_s(self):
        with self.assertRaises(PrecisionLimitError):
            spectra.uniform_eigenvalues_series(20.0, 5)

    def test_averaged_partial_trace(self):
        self.assertAlmostEqual(spectra.averaged_partial_trace([1.0, -1.0, 1.0, -1.0]), 0.5)


class BoundsTests(SimpleTestCase):
    def test_gaussian_bounds(self):
        self.assertEqual(spectra.spectral_bounds("gaussian", 1.0), (0.0, 1.0))
        low, high = spectra.spectral_bounds("gaussian", 1.0 / 3.0)
        self.assertAlmostEqual(low, -0.75, places=12)
        self.assertAlmostEqual(high, 1.5, places=12)

    def test_short_truncation_is_refused(self):
        with self.assertRaises(InsufficientTruncationError):
            spectra.spectral_bounds("gaussian", 1.0 / 3.0, n_max=5)

    def test_uniform_upper_bound(self):
        low, high = spectra.spectral_bounds("uniform", 4.0)
        self.assertAlmostEqual(high, 0.5 * (1.0 - math.exp(-4.0)), places=10)
        self.assertLess(low, 0.0)

    def test_uniform_lower_bound_is_negative_across_the_grid(self):
        for s in np.linspace(0.1, 40.0, 50):
            with self.subTest(s=float(s)):
                low, _ = spectra.spectral_bounds("uniform", float(s))
                self.assertLess(low, 0.0)

    def test_uncertainty_axis(self):
        self.assertEqual(spectra.uncertainty_over_hbar("gaussian", 4.0), 2.0)
        self.assertEqual(spectra.uncertainty_over_hbar("uniform", 4.0), 1.0)


class SpectrumResultTests(SimpleTestCase):
    def test_ties_are_ordered_by_descending_index(self):
        result = spectra.SpectrumResult.from_values([0.5, 0.5, 0.1], 1.0, "eigensolve")
        self.assertEqual(result.indices.tolist(), [1, 0, 2])
        np.testing.assert_array_equal(result.by_index(), [0.5, 0.5, 0.1])

    def test_out_of_range_eigenvalue_is_numerical_error(self):
        with self.assertRaises(NumericalError):
            spectra.SpectrumResult.from_values([2.5, 0.1], 1.0, "eigensolve")

    def test_jacobi_on_exchange_matrix(self):
        result = spectra.eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
        self.assertAlmostEqual(result.max_bound, 1.0, places=12)
        self.assertAlmostEqual(result.min_bound, -1.0, places=12)

    def test_jacobi_matches_lapack_on_random_symmetric_matrices(self):
        rng = np.random.default_rng(20)
        for trial in range(10):
            with self.subTest(trial=trial):
                raw = rng.uniform(-1.0, 1.0, size=(20, 20))
                matrix = raw + raw.T
                matrix /= np.linalg.norm(matrix, 2)
                result = spectra.eigendecompose(matrix)
                np.testing.assert_allclose(
                    np.sort(result.eigenvalues), np.linalg.eigvalsh(matrix), atol=1e-10
                )

    def test_jacobi_returns_the_diagonal_of_a_diagonal_matrix(self):
        rng = np.random.default_rng(7)
        for trial in range(10):
            with self.subTest(trial=trial):
                diagonal = rng.uniform(-1.0, 1.0, size=20)
                result = spectra.eigendecompose(np.diag(diagonal))
                np.testing.assert_allclose(result.by_index(), diagonal, atol=1e-14)

    def test_jacobi_on_a_radial_matrix_with_negative_eigenvalues(self):
        matrix = quantizer.quantize_radial(GaussianDensity(1.0, 0.2), 30)
        result = spectra.eigendecompose(matrix)
        np.testing.assert_allclose(result.by_index(), spectra.gaussian_eigenvalues(0.2, 30), atol=1e-10)
        self.assertLess(result.min_bound, 0.0)

    def test_asymmetric_matrix_is_rejected(self):
        with self.assertRaises(ValueError):
            spectra.eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


class SweepTests(SimpleTestCase):
    def test_rows_follow_input_order(self):
        result = spectra.sweep("gaussian", [0.5, 1.0, 2.0])
        self.assertEqual([row.uncertainty_over_hbar for row in result.rows], [0.25, 0.5, 1.0])
        self.assertEqual(result.families(), ["gaussian"])

    def test_threaded_sweep_matches_serial(self):
        s_values = [0.5, 1.0, 2.0, 3.0]
        self.assertEqual(spectra.sweep("gaussian", s_values, jobs=3), spectra.sweep("gaussian", s_values))

    def test_decreasing_s_is_rejected(self):
        with self.assertRaises(ValueError):
            spectra.sweep("gaussian", [2.0, 1.0])

    def test_mixed_state_weights(self):
        weights = spectra.mixed_state_weights(3.0, 40)
        np.testing.assert_allclose(weights.weights, 0.5 ** np.arange(1, 42), atol=1e-15)
        self.assertAlmostEqual(weights.total, 1.0, places=12)
        with self.assertRaises(ValueError):
            spectra.mixed_state_weights(0.5, 10)
