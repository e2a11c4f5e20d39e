import math

import numpy as np
from django.test import SimpleTestCase

from groenewold.services import kernel_check
from groenewold.services.densities import GaussianDensity
from groenewold.services.spectra import gaussian_eigenvalue


class CoordinateKernelTests(SimpleTestCase):
    def test_values_and_symmetry(self):
        self.assertAlmostEqual(kernel_check.coordinate_kernel(0.0, 0.0, 1.0, 1.0, 1.0), 1.0 / math.sqrt(math.pi))
        self.assertAlmostEqual(
            kernel_check.coordinate_kernel(0.3, 1.7, 1.2, 0.4, 0.9),
            kernel_check.coordinate_kernel(1.7, 0.3, 1.2, 0.4, 0.9),
            places=15,
        )

    def test_kernel_is_fourier_transform_of_density(self):
        density = GaussianDensity(1.2, 0.8)
        x = np.linspace(-2.0, 2.0, 9)
        y = np.linspace(1.5, -2.5, 9)
        np.testing.assert_allclose(
            kernel_check.kernel_from_density(density, x, y),
            kernel_check.coordinate_kernel(x, y, 1.2, 0.8, 1.0),
            atol=1e-9,
        )

    def test_trace_is_one(self):
        self.assertAlmostEqual(kernel_check.kernel_trace(1.0, 2.0, 1.0), 1.0, places=10)


class HermiteIdentityTests(SimpleTestCase):
    def test_oscillator_states_are_eigenfunctions(self):
        for n in (0, 2, 5):
            with self.subTest(n=n):
                self.assertLess(kernel_check.hermite_identity_residual(n, 3.0), 1e-8)
        self.assertLess(kernel_check.hermite_identity_residual(0, 1.0), 1e-10)

    def test_wrong_eigenvalue_is_detected(self):
        residual = kernel_check.hermite_identity_residual(
            2, 3.0, eigenvalue=gaussian_eigenvalue(2, 3.0) + 0.01
        )
        self.assertGreater(residual, 5e-3)

    def test_narrow_grid_is_widened(self):
        grid = kernel_check.validated_grid(0, 1.0, 1.0, 1.0, kernel_check.KernelGrid(1.0, 101))
        self.assertEqual(grid.half_width, 8.0)

    def test_grid_needs_three_points(self):
        with self.assertRaises(ValueError):
            kernel_check.KernelGrid(1.0, 2)
