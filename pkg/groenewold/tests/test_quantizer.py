import dataclasses
import math

import numpy as np
from django.test import SimpleTestCase

from groenewold.exceptions import BasisMismatchError, SymmetryViolationError, TruncationError
from groenewold.services import quantizer, spectra
from groenewold.services.densities import (
    GaussianDensity,
    GeneralDensity,
    SupportBox,
    UniformEllipseDensity,
    density_from_spec,
)


class KernelElementTests(SimpleTestCase):
    def test_origin_and_unit_displacement(self):
        self.assertAlmostEqual(quantizer.displacement_matrix_element(0, 0, 0.0).real, 2.0, places=14)
        self.assertAlmostEqual(quantizer.displacement_matrix_element(1, 1, 0.0).real, -2.0, places=14)
        self.assertAlmostEqual(
            quantizer.displacement_matrix_element(0, 0, math.sqrt(0.5)).real, 2.0 * math.exp(-1.0), places=14
        )

    def test_first_band_and_hermiticity(self):
        alpha = 0.3 + 0.2j
        expected = 4.0 * alpha * math.exp(-2.0 * abs(alpha) ** 2)
        lower = quantizer.displacement_matrix_element(1, 0, alpha)
        upper = quantizer.displacement_matrix_element(0, 1, alpha)
        self.assertAlmostEqual(abs(lower - expected), 0.0, places=14)
        self.assertAlmostEqual(abs(upper - np.conj(expected)), 0.0, places=14)

    def test_fock_label_rejects_negative_index(self):
        with self.assertRaises(ValueError):
            quantizer.FockLabel(-1)


class RadialQuantizationTests(SimpleTestCase):
    def test_gaussian_diagonal_is_geometric(self):
        matrix = quantizer.quantize_radial(GaussianDensity(beta=1.0, gamma=3.0), 20)
        np.testing.assert_allclose(matrix.diagonal[:3], [0.5, 0.25, 0.125], atol=1e-10)
        self.assertTrue(matrix.is_diagonal)
        self.assertEqual(matrix.dim, 21)

    def test_pure_state_at_s_equal_one(self):
        matrix = quantizer.quantize_radial(GaussianDensity(1.0, 1.0), 6)
        np.testing.assert_allclose(matrix.diagonal, [1.0, 0, 0, 0, 0, 0, 0], atol=1e-10)

    def test_radial_path_reproduces_closed_form_spectrum(self):
        for s in (0.2, 0.5, 1.0, 2.0, 3.0, 5.0):
            with self.subTest(s=s):
                matrix = quantizer.quantize_radial(GaussianDensity(beta=1.0, gamma=s), 30)
                np.testing.assert_allclose(matrix.diagonal, spectra.gaussian_eigenvalues(s, 30), rtol=0, atol=1e-10)

    def test_explicit_trace_tolerance_is_enforced(self):
        with self.assertRaises(TruncationError):
            quantizer.quantize_radial(GaussianDensity(1.0, 3.0), 3, trace_tolerance=1e-8)

    def test_export_has_documented_keys(self):
        payload = quantizer.quantize_radial(GaussianDensity(1.0, 3.0), 4).to_dict()
        self.assertEqual(set(payload), {"dim", "s", "hbar", "entries", "trace", "tail_bound"})
        self.assertEqual(len(payload["entries"]), 25)


class GeneralQuantizationTests(SimpleTestCase):
    def test_general_path_agrees_with_radial_path(self):
        for density in (GaussianDensity(1.0, 2.0), UniformEllipseDensity(1.0, 2.0)):
            with self.subTest(density=density):
                general = quantizer.quantize_general(density, 8)
                radial = quantizer.quantize_radial(density, 8)
                np.testing.assert_allclose(general.entries, radial.entries, atol=1e-8)

    def test_threads_do_not_change_the_result(self):
        density = GaussianDensity(1.0, 2.0)
        serial = quantizer.quantize_general(density, 6)
        threaded = quantizer.quantize_general(density, 6, jobs=3)
        np.testing.assert_allclose(threaded.entries, serial.entries, atol=1e-14)

    def test_uniform_square_has_negative_eigenvalue(self):
        square = density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 1})
        spectrum = spectra.eigendecompose(quantizer.quantize_general(square, 16))
        self.assertLess(spectrum.min_bound, -1e-4)
        self.assertLessEqual(spectrum.max_bound, 2.0)

    def test_momentum_asymmetric_density_is_rejected(self):
        lopsided = GeneralDensity(
            sampler=lambda q, p: np.full(np.broadcast(q, p).shape, 0.25),
            support_box=SupportBox(-1.0, 1.0, 0.0, 2.0),
            hbar=1.0,
            beta=1.0,
            gamma=1.0,
        )
        with self.assertRaises(SymmetryViolationError):
            quantizer.quantize_general(lopsided, 4)


class ObservableTests(SimpleTestCase):
    def test_pair_traces(self):
        one = quantizer.quantize_radial(GaussianDensity(1.0, 1.0), 60)
        three = quantizer.quantize_radial(GaussianDensity(math.sqrt(3.0), math.sqrt(3.0)), 60)
        self.assertAlmostEqual(quantizer.trace_product(one, three), 0.5, places=8)
        self.assertAlmostEqual(quantizer.trace_product(three, three), 1.0 / 3.0, places=8)

    def test_pair_trace_needs_matching_basis(self):
        tall = quantizer.quantize_radial(GaussianDensity(1.0, 3.0), 30)
        wide = quantizer.quantize_radial(GaussianDensity(3.0, 1.0), 30)
        with self.assertRaises(BasisMismatchError):
            quantizer.trace_product(tall, wide)

    def test_expectations_match_classical_moments(self):
        density = GaussianDensity(beta=1.5, gamma=2.0)
        matrix = quantizer.quantize_radial(density, 80)
        dim, aspect = matrix.dim, matrix.aspect
        self.assertAlmostEqual(quantizer.expectation(matrix, quantizer.identity_operator(dim)), 1.0, places=6)
        self.assertAlmostEqual(
            quantizer.expectation(matrix, quantizer.position_squared(dim, aspect)), 1.125, places=6
        )
        self.assertAlmostEqual(
            quantizer.expectation(matrix, quantizer.momentum_squared(dim, aspect)), 2.0, places=6
        )
        self.assertAlmostEqual(quantizer.expectation(matrix, quantizer.number_operator(dim)), 1.0, places=6)

    def test_position_operator_entries(self):
        matrix = quantizer.position_squared(3)
        np.testing.assert_allclose(np.diag(matrix), [0.5, 1.5, 2.5])
        self.assertAlmostEqual(matrix[2, 0], 0.5 * math.sqrt(2.0))
        self.assertAlmostEqual(quantizer.momentum_squared(3)[2, 0], -0.5 * math.sqrt(2.0))

    def test_weyl_symbol_of_pure_state(self):
        pure = quantizer.quantize_radial(GaussianDensity(1.0, 1.0), 12)
        self.assertAlmostEqual(quantizer.weyl_symbol(pure, 0.0, 0.0), 1.0 / math.pi, places=6)
        np.testing.assert_allclose(
            quantizer.weyl_symbol(pure, np.array([0.5, 1.0]), 0.0),
            np.exp(-np.array([0.25, 1.0])) / math.pi,
            atol=1e-6,
        )

    def test_weyl_symbol_keeps_small_off_diagonal_entries(self):
        pure = quantizer.quantize_radial(GaussianDensity(1.0, 1.0), 4)
        coherence = 1e-9
        entries = np.array(pure.entries)
        entries[0, 1] = entries[1, 0] = coherence
        perturbed = dataclasses.replace(pure, entries=entries)
        self.assertTrue(perturbed.is_diagonal)

        alpha = quantizer.phase_space_alpha(0.5, 0.0, perturbed.aspect, perturbed.hbar)
        expected = 2.0 * coherence * quantizer.displacement_matrix_element(1, 0, alpha).real / (2.0 * math.pi)
        difference = quantizer.weyl_symbol(perturbed, 0.5, 0.0) - quantizer.weyl_symbol(pure, 0.5, 0.0)
        self.assertAlmostEqual(difference, expected, delta=1e-13)
