import math

import numpy as np
from django.test import SimpleTestCase

from groenewold.exceptions import ConfigurationError, MomentDivergenceError
from groenewold.services import densities
from groenewold.services.densities import (
    GaussianDensity,
    GeneralDensity,
    RadialDensity,
    SupportBox,
    UniformEllipseDensity,
)


class DensityFamilyTests(SimpleTestCase):
    def test_gaussian_peak_and_s(self):
        rho = GaussianDensity(beta=2.0, gamma=1.5, hbar=0.5)
        self.assertAlmostEqual(rho.s, 6.0)
        self.assertAlmostEqual(densities.evaluate(rho, 0.0, 0.0), 1.0 / (math.pi * 3.0), places=14)

    def test_uniform_ellipse_support(self):
        rho = UniformEllipseDensity(beta=2.0, gamma=1.0)
        self.assertAlmostEqual(densities.evaluate(rho, 1.9, 0.0), 1.0 / (2.0 * math.pi), places=14)
        self.assertEqual(densities.evaluate(rho, 0.0, 1.01), 0.0)

    def test_non_positive_scale_is_rejected(self):
        with self.assertRaises(ValueError):
            GaussianDensity(beta=0.0, gamma=1.0)

    def test_radial_view_matches_gaussian(self):
        rho = GaussianDensity(beta=1.3, gamma=0.8)
        q = np.linspace(-3.0, 3.0, 25)
        p = np.linspace(2.0, -2.0, 25)
        np.testing.assert_allclose(rho.as_radial().evaluate(q, p), rho.evaluate(q, p), atol=1e-14)

    def test_elliptic_chart_needs_centred_box(self):
        with self.assertRaises(ValueError):
            GeneralDensity(
                sampler=lambda q, p: np.ones(np.broadcast(q, p).shape),
                support_box=SupportBox(0.0, 1.0, -1.0, 1.0),
                hbar=1.0,
                chart_kind="elliptic",
            )


class IntegralTests(SimpleTestCase):
    def test_normalisation_residuals(self):
        self.assertLess(densities.normalization_residual(GaussianDensity(1.0, 1.0)), 1e-10)
        self.assertLess(densities.normalization_residual(UniformEllipseDensity(2.0, 1.0)), 1e-12)

    def test_doubled_sampler_fails_normalisation(self):
        doubled = densities.density_from_spec(
            {"type": "uniform_box", "q_half_width": 1, "p_half_width": 1, "height": 0.5}
        )
        self.assertAlmostEqual(densities.normalization_residual(doubled), 1.0, places=10)

    def test_uncertainty_products(self):
        square = densities.density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 1})
        self.assertAlmostEqual(densities.uncertainty_product(GaussianDensity(1.0, 1.0)), 0.5, places=10)
        self.assertAlmostEqual(densities.uncertainty_product(UniformEllipseDensity(2.0, 1.0)), 0.5, places=10)
        self.assertAlmostEqual(densities.uncertainty_product(square), 1.0 / 3.0, places=10)

    def test_heavy_tail_has_no_second_moment(self):
        heavy = RadialDensity(
            profile=lambda u: 1.0 / (math.pi * (1.0 + u) ** 2),
            beta=1.0,
            gamma=1.0,
            hbar=1.0,
        )
        with self.assertRaises(MomentDivergenceError):
            heavy.uncertainty_product()

    def test_overlaps(self):
        unit = GaussianDensity(1.0, 1.0)
        self.assertAlmostEqual(densities.overlap_integral(unit, unit), 1.0 / (2.0 * math.pi), places=10)
        self.assertAlmostEqual(
            densities.overlap_integral(unit, GaussianDensity(2.0, 2.0)), 1.0 / (5.0 * math.pi), places=10
        )
        ellipse = UniformEllipseDensity(1.0, 1.0)
        self.assertAlmostEqual(densities.overlap_integral(ellipse, ellipse), 1.0 / math.pi, places=10)

    def test_overlap_is_symmetric(self):
        gaussian = GaussianDensity(1.5, 0.7)
        ellipse = UniformEllipseDensity(1.0, 1.0)
        self.assertAlmostEqual(
            densities.overlap_integral(gaussian, ellipse),
            densities.overlap_integral(ellipse, gaussian),
            places=12,
        )


class DensitySpecTests(SimpleTestCase):
    def test_known_types(self):
        self.assertIsInstance(densities.density_from_spec({"type": "gaussian", "beta": 1, "gamma": 2}), GaussianDensity)
        self.assertIsInstance(
            densities.density_from_spec({"type": "uniform_ellipse", "beta": 1, "gamma": 2}), UniformEllipseDensity
        )

    def test_bad_specs_raise_configuration_error(self):
        for spec in (
            {"type": "triangle"},
            {"type": "gaussian", "beta": 1},
            {"type": "gaussian", "beta": -1, "gamma": 1},
            {"type": "uniform_box", "q_half_width": "wide", "p_half_width": 1},
            ["gaussian"],
        ):
            with self.subTest(spec=spec), self.assertRaises(ConfigurationError):
                densities.density_from_spec(spec)
