"""
Invariant suites run by ``manage.py verify``.

Each check returns (passed, detail). Checks are grouped by the service they
exercise; a check that raises counts as failed with the exception as detail.

Usage:
    from groenewold.services.verification import run_suites

    results = run_suites(only=["kernel"])
    all(result.passed for result in results)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from groenewold.exceptions import ConfigurationError
from groenewold.services import densities, kernel_check, quantizer, spectra
from groenewold.services import special_functions as sf

logger = logging.getLogger(__name__)

CheckFn = Callable[[], tuple[bool, str]]

# group -> [(name, check)], in registration order
SUITES: dict[str, list[tuple[str, CheckFn]]] = {
    "special_functions": [],
    "densities": [],
    "quantizer": [],
    "spectra": [],
    "kernel": [],
}

AGREEMENT_S_VALUES = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str


def check(group: str, name: str):
    def register(fn: CheckFn) -> CheckFn:
        SUITES[group].append((name, fn))
        return fn

    return register


def _all_within(error: float, tolerance: float) -> tuple[bool, str]:
    return error <= tolerance, f"max error {error:.2e} (limit {tolerance:.0e})"


# -- special functions ----------------------------------------------------------

@check("special_functions", "polynomial examples")
def _polynomial_examples():
    values = [sf.laguerre(1, 0, 2.0), sf.laguerre(2, 0, 2.0), sf.hermite(1, 1.0), sf.hermite(3, 1.0)]
    expected = [-1.0, -1.0, 2.0, -4.0]
    error = max(abs(a - b) for a, b in zip(values, expected))
    return _all_within(error, 1e-14)


def _explicit_laguerre(n: int, k: int, x: int) -> tuple[Fraction, Fraction]:
    """Exact L_n^k(x) and the sum of absolute terms of its power expansion."""
    value = Fraction(0)
    scale = Fraction(0)
    for j in range(n + 1):
        term = Fraction(math.comb(n + k, n - j) * x ** j, math.factorial(j))
        value += (-1) ** j * term
        scale += term
    return value, scale


@check("special_functions", "laguerre recurrence matches explicit expansion")
def _laguerre_expansion():
    worst = 0.0
    for k in (0, 1, 3):
        for n in range(16):
            for x in range(0, 51, 5):
                exact, scale = _explicit_laguerre(n, k, x)
                worst = max(worst, abs(sf.laguerre(n, k, float(x)) - float(exact)) / float(scale))
    return _all_within(worst, 1e-10)


@check("special_functions", "oscillator orthonormality n, m <= 20")
def _orthonormality():
    rule = sf.finite_rule(200, -12.0, 12.0)
    table = sf.oscillator_table(20, rule.nodes, 1.0)
    gram = (table * rule.weights) @ table.T
    return _all_within(float(np.max(np.abs(gram - np.eye(21)))), 1e-10)


@check("special_functions", "quadrature exactness")
def _quadrature_exactness():
    errors = [
        abs(sf.finite_rule(2, -1.0, 1.0).integrate(lambda t: t ** 2) - 2.0 / 3.0),
        abs(sf.finite_rule(1, 0.0, 2.0).integrate(np.ones_like) - 2.0),
        abs(sf.finite_rule(20, 0.0, 5.0).integrate(lambda t: np.exp(-t)) - (1.0 - math.exp(-5.0))),
        abs(sf.semi_infinite_rule(8).integrate(lambda t: t) - 1.0),
        abs(sf.semi_infinite_rule(8).integrate(lambda t: sf.laguerre(5, 0, 2.0 * t)) + 1.0),
    ]
    return _all_within(max(errors), 1e-12)


def _averaged_partial_error(order: int, t: np.ndarray) -> float:
    terms = (-1.0) ** np.arange(order + 2)[:, None] * sf.laguerre_table(order + 1, 0, 2.0 * t)
    partial = np.cumsum(terms, axis=0)
    averaged = 0.5 * (partial[order] + partial[order + 1])
    return float(np.max(np.abs(averaged - 0.5 * np.exp(t))))


@check("special_functions", "partial generating function improves with N")
def _generating_function():
    t = np.linspace(0.0, 3.0, 61)
    coarse, fine = _averaged_partial_error(16, t), _averaged_partial_error(512, t)
    return fine < coarse, f"averaged error {coarse:.3e} at N=16, {fine:.3e} at N=512"


# -- densities ------------------------------------------------------------------

@check("densities", "normalisation gate")
def _normalisation():
    gaussian = densities.normalization_residual(densities.GaussianDensity(1.0, 1.0))
    ellipse = densities.normalization_residual(densities.UniformEllipseDensity(2.0, 1.0))
    doubled = densities.normalization_residual(
        densities.density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 1, "height": 0.5})
    )
    passed = gaussian <= 1e-10 and ellipse <= 1e-12 and abs(doubled - 1.0) <= 1e-10
    return passed, f"gaussian {gaussian:.1e}, ellipse {ellipse:.1e}, doubled sampler {doubled:.6g}"


@check("densities", "uncertainty products")
def _uncertainty():
    square = densities.density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 1})
    values = [
        densities.uncertainty_product(densities.GaussianDensity(1.0, 1.0)),
        densities.uncertainty_product(densities.UniformEllipseDensity(2.0, 1.0)),
        densities.uncertainty_product(square),
        densities.uncertainty_product(densities.GaussianDensity(1.5, 2.0).as_radial()),
    ]
    expected = [0.5, 0.5, 1.0 / 3.0, 1.5]
    return _all_within(max(abs(a - b) for a, b in zip(values, expected)), 1e-10)


@check("densities", "overlap integrals")
def _overlaps():
    unit = densities.GaussianDensity(1.0, 1.0)
    wide = densities.GaussianDensity(2.0, 2.0)
    ellipse = densities.UniformEllipseDensity(1.0, 1.0)
    errors = [
        abs(densities.overlap_integral(unit, unit) - 1.0 / (2.0 * math.pi)),
        abs(densities.overlap_integral(unit, wide) - 1.0 / (5.0 * math.pi)),
        abs(densities.overlap_integral(ellipse, ellipse) - 1.0 / math.pi),
    ]
    return _all_within(max(errors), 1e-10)


@check("densities", "overlap symmetry and Cauchy-Schwarz")
def _overlap_inequalities():
    pool = [
        densities.GaussianDensity(1.0, 1.0),
        densities.GaussianDensity(1.5, 0.7),
        densities.UniformEllipseDensity(1.0, 1.0),
        densities.density_from_spec({"type": "uniform_box", "q_half_width": 1.2, "p_half_width": 1.2}),
    ]
    self_overlap = [densities.overlap_integral(rho, rho) for rho in pool]
    asymmetry, excess = 0.0, -math.inf
    for i, rho in enumerate(pool):
        for j in range(i + 1, len(pool)):
            forward = densities.overlap_integral(rho, pool[j])
            backward = densities.overlap_integral(pool[j], rho)
            asymmetry = max(asymmetry, abs(forward - backward))
            excess = max(excess, forward ** 2 - self_overlap[i] * self_overlap[j])
    passed = asymmetry <= 1e-12 and excess <= 1e-12
    return passed, f"asymmetry {asymmetry:.1e}, Cauchy-Schwarz excess {excess:.1e}"


@check("densities", "non-negativity and radial consistency")
def _pointwise():
    rng = np.random.default_rng(20240601)
    q = rng.uniform(-4.0, 4.0, 10_000)
    p = rng.uniform(-4.0, 4.0, 10_000)
    gaussian = densities.GaussianDensity(1.3, 0.8)
    pool = [
        gaussian,
        densities.UniformEllipseDensity(1.0, 2.0),
        gaussian.as_radial(),
        densities.density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 2}),
    ]
    lowest = min(float(np.min(rho.evaluate(q, p))) for rho in pool)
    mismatch = float(np.max(np.abs(gaussian.as_radial().evaluate(q, p) - gaussian.evaluate(q, p))))
    return lowest >= 0.0 and mismatch <= 1e-12, f"min value {lowest:.3g}, radial mismatch {mismatch:.1e}"


# -- quantizer ------------------------------------------------------------------

@check("quantizer", "kernel matrix elements")
def _kernel_elements():
    values = [
        quantizer.displacement_matrix_element(0, 0, 0.0),
        quantizer.displacement_matrix_element(1, 1, 0.0),
        quantizer.displacement_matrix_element(0, 0, math.sqrt(0.5)),
    ]
    expected = [2.0, -2.0, 2.0 * math.exp(-1.0)]
    return _all_within(max(abs(a - b) for a, b in zip(values, expected)), 1e-14)


@check("quantizer", "radial path reproduces the closed-form gaussian spectrum")
def _radial_closed_form():
    worst = 0.0
    for s in (0.2, 0.5, 1.0, 2.0, 3.0, 5.0):
        matrix = quantizer.quantize_radial(densities.GaussianDensity(beta=1.0, gamma=s), 30)
        worst = max(worst, float(np.max(np.abs(matrix.diagonal - spectra.gaussian_eigenvalues(s, 30)))))
    return _all_within(worst, 1e-10)


@check("quantizer", "general path agrees with radial path")
def _radial_general_agreement():
    worst_entry, worst_off = 0.0, 0.0
    for s in AGREEMENT_S_VALUES:
        for density in (densities.GaussianDensity(1.0, s), densities.UniformEllipseDensity(1.0, s)):
            general = quantizer.quantize_general(density, 16)
            radial = quantizer.quantize_radial(density, 16)
            worst_entry = max(worst_entry, float(np.max(np.abs(general.entries - radial.entries))))
            off = general.entries - np.diag(general.diagonal)
            worst_off = max(worst_off, float(np.max(np.abs(off))))
    passed = worst_entry <= 1e-8 and worst_off <= 1e-8
    return passed, f"max entry difference {worst_entry:.2e}, max off-diagonal {worst_off:.2e}"


@check("quantizer", "uniform square has a negative eigenvalue")
def _square_negativity():
    square = densities.density_from_spec({"type": "uniform_box", "q_half_width": 1, "p_half_width": 1})
    spectrum = spectra.eigendecompose(quantizer.quantize_general(square, 16))
    passed = spectrum.min_bound < -1e-4 and abs(spectrum.max_bound) <= 2.0 + 1e-8
    return passed, f"eigenvalues in [{spectrum.min_bound:.6g}, {spectrum.max_bound:.6g}]"


@check("quantizer", "pair traces")
def _pair_traces():
    matrices = {s: quantizer.quantize_radial(densities.GaussianDensity(math.sqrt(s), math.sqrt(s)), 60) for s in (1.0, 3.0)}
    mixed = quantizer.trace_product(matrices[1.0], matrices[3.0])
    purity = quantizer.trace_product(matrices[3.0], matrices[3.0])
    overlap = densities.overlap_integral(
        densities.GaussianDensity(1.0, 1.0), densities.GaussianDensity(math.sqrt(3.0), math.sqrt(3.0))
    )
    errors = [abs(mixed - 0.5), abs(purity - 1.0 / 3.0), abs(mixed - 2.0 * math.pi * overlap)]
    passed = max(errors) <= 1e-8 and min(mixed, purity) >= -1e-10
    return passed, f"Tr(rho1 rho3) {mixed:.12g}, Tr(rho3^2) {purity:.12g}, 2 pi overlap {2 * math.pi * overlap:.12g}"


@check("quantizer", "expectations match classical moments")
def _expectations():
    density = densities.GaussianDensity(beta=1.5, gamma=2.0)
    matrix = quantizer.quantize_radial(density, 80)
    dim, aspect = matrix.dim, matrix.aspect
    values = [
        quantizer.expectation(matrix, quantizer.identity_operator(dim)),
        quantizer.expectation(matrix, quantizer.position_squared(dim, aspect, density.hbar)),
        quantizer.expectation(matrix, quantizer.momentum_squared(dim, aspect, density.hbar)),
        quantizer.expectation(matrix, quantizer.number_operator(dim)),
    ]
    expected = [1.0, density.beta ** 2 / 2.0, density.gamma ** 2 / 2.0, (density.s - 1.0) / 2.0]
    return _all_within(max(abs(a - b) for a, b in zip(values, expected)), 1e-6)


@check("quantizer", "weyl symbol round trip")
def _weyl_round_trip():
    pure = quantizer.quantize_radial(densities.GaussianDensity(1.0, 1.0), 12)
    errors = [
        abs(quantizer.weyl_symbol(pure, 0.0, 0.0) - 1.0 / math.pi),
        abs(quantizer.weyl_symbol(pure, 3.0, 0.0) - math.exp(-9.0) / math.pi),
    ]
    return _all_within(max(errors), 1e-6)


# -- spectra --------------------------------------------------------------------

@check("spectra", "gaussian trace and purity identities")
def _gaussian_identities():
    worst_trace, worst_purity = 0.0, 0.0
    for s in (0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 20.0):
        n_max = spectra.required_n_max("gaussian", s)
        values = spectra.gaussian_eigenvalues(s, n_max)
        worst_trace = max(worst_trace, abs(float(np.sum(values)) + spectra.gaussian_tail(s, n_max) - 1.0))
        worst_purity = max(worst_purity, abs(float(np.sum(values ** 2)) - 1.0 / s))
    passed = worst_trace <= 1e-10 and worst_purity <= 1e-10
    return passed, f"trace error {worst_trace:.1e}, purity error {worst_purity:.1e}"


@check("spectra", "gaussian sign structure")
def _gaussian_signs():
    failures = []
    for s in (0.1, 0.3, 0.5, 0.9):
        values = spectra.gaussian_eigenvalues(s, 40)
        if not (np.all(values[1::2] < 0) and np.all(values[0::2] > 0) and values[0] > 1.0):
            failures.append(s)
    for s in (1.1, 2.0, 5.0, 20.0):
        values = spectra.gaussian_eigenvalues(s, 40)
        if not np.all((values > 0) & (values < 1)):
            failures.append(s)
    return not failures, f"violations at s={failures}" if failures else "sign pattern holds"


@check("spectra", "small-s limit approaches 2(-1)^n")
def _delta_limit():
    s = 1e-4
    relative = [abs(spectra.gaussian_eigenvalue(n, s) / (2.0 * (-1) ** n) - 1.0) for n in (0, 1)]
    relative += [abs(value / (2.0 * (-1) ** n) - 1.0) for n, value in enumerate(spectra.uniform_eigenvalues(s, 3))]
    return _all_within(max(relative), 5e-4)


@check("spectra", "uniform quadrature agrees with the closed-form series")
def _uniform_series():
    worst = 0.0
    for s in AGREEMENT_S_VALUES:
        worst = max(
            worst,
            float(np.max(np.abs(spectra.uniform_eigenvalues(s, 60) - spectra.uniform_eigenvalues_series(s, 60)))),
        )
    lambda_0 = spectra.uniform_eigenvalue(0, 2.0)
    worst = max(worst, abs(lambda_0 - (1.0 - math.exp(-2.0))))
    return _all_within(worst, 1e-10)


@check("spectra", "uniform averaged trace")
def _uniform_trace():
    worst = max(
        abs(spectra.averaged_partial_trace(spectra.uniform_eigenvalues_series(s, 1000)) - 1.0)
        for s in AGREEMENT_S_VALUES
    )
    return _all_within(worst, 5e-3)


@check("spectra", "uniform lower bound stays negative")
def _uniform_negative():
    s_grid = np.linspace(0.1, 40.0, 50)
    lows = [spectra.spectral_bounds("uniform", float(s))[0] for s in s_grid]
    highest = max(lows)
    return highest < 0.0, f"largest lower bound {highest:.3e}"


@check("spectra", "spectral bound examples")
def _bound_examples():
    cases = [
        (spectra.spectral_bounds("gaussian", 1.0), (0.0, 1.0)),
        (spectra.spectral_bounds("gaussian", 1.0 / 3.0), (-0.75, 1.5)),
    ]
    error = max(abs(a - b) for got, want in cases for a, b in zip(got, want))
    low, high = spectra.spectral_bounds("uniform", 4.0)
    error = max(error, abs(high - 0.5 * (1.0 - math.exp(-4.0))))
    return error <= 1e-12 and low < 0, f"max error {error:.1e}, uniform s=4 lower bound {low:.6g}"


@check("spectra", "eigensolver reproduces the diagonal gaussian spectrum")
def _eigensolver():
    matrix = quantizer.quantize_radial(densities.GaussianDensity(1.0, 3.0), 30)
    spectrum = spectra.eigendecompose(matrix)
    exchange = spectra.eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
    errors = [
        float(np.max(np.abs(spectrum.by_index() - spectra.gaussian_eigenvalues(3.0, 30)))),
        abs(exchange.max_bound - 1.0),
        abs(exchange.min_bound + 1.0),
    ]
    return _all_within(max(errors), 1e-10)


@check("spectra", "mixed-state weights")
def _mixed_state():
    weights = spectra.mixed_state_weights(3.0, 40)
    error = max(
        float(np.max(np.abs(weights.weights - 0.5 ** np.arange(1, 42)))),
        abs(weights.total - 1.0),
    )
    return _all_within(error, 1e-12)


# -- kernel ---------------------------------------------------------------------

@check("kernel", "kernel values and symmetry")
def _kernel_values():
    errors = [
        abs(kernel_check.coordinate_kernel(0.0, 0.0, 1.0, 1.0, 1.0) - 1.0 / math.sqrt(math.pi)),
        abs(kernel_check.coordinate_kernel(1.0, -1.0, 1.0, 1.0, 1.0) - math.exp(-1.0) / math.sqrt(math.pi)),
        abs(kernel_check.coordinate_kernel(0.3, 1.7, 1.2, 0.4, 0.9) - kernel_check.coordinate_kernel(1.7, 0.3, 1.2, 0.4, 0.9)),
    ]
    return _all_within(max(errors), 1e-15)


@check("kernel", "kernel matches the Fourier transform of the density")
def _kernel_fourier():
    rng = np.random.default_rng(7)
    x = rng.uniform(-3.0, 3.0, 100)
    y = rng.uniform(-3.0, 3.0, 100)
    density = densities.GaussianDensity(1.2, 0.8)
    numeric = kernel_check.kernel_from_density(density, x, y)
    exact = kernel_check.coordinate_kernel(x, y, density.beta, density.gamma, density.hbar)
    return _all_within(float(np.max(np.abs(numeric - exact))), 1e-9)


@check("kernel", "kernel trace")
def _kernel_trace():
    errors = [abs(kernel_check.kernel_trace(1.0, s, 1.0) - 1.0) for s in AGREEMENT_S_VALUES]
    return _all_within(max(errors), 1e-10)


@check("kernel", "oscillator states are kernel eigenfunctions")
def _kernel_identity():
    worst = max(
        kernel_check.hermite_identity_residual(n, s)
        for s in AGREEMENT_S_VALUES
        for n in range(11)
    )
    pure = kernel_check.hermite_identity_residual(0, 1.0)
    perturbed = kernel_check.hermite_identity_residual(2, 3.0, eigenvalue=spectra.gaussian_eigenvalue(2, 3.0) + 0.01)
    passed = worst <= 1e-8 and pure <= 1e-10 and perturbed >= 5e-3
    return passed, f"worst residual {worst:.2e}, pure state {pure:.1e}, perturbed {perturbed:.2e}"


def run_suites(only: Iterable[str] | None = None) -> list[CheckResult]:
    """
    Run the selected groups (all when ``only`` is empty) in a fixed order.

    Raises:
        ConfigurationError: for an unknown group name.
    """
    selected = list(only or SUITES)
    unknown = [group for group in selected if group not in SUITES]
    if unknown:
        raise ConfigurationError(f"unknown verify group(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")

    results = []
    for group in SUITES:
        if group not in selected:
            continue
        for name, fn in SUITES[group]:
            try:
                passed, detail = fn()
            except Exception as exc:  # a crashing check is a failing check
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(group=group, name=name, passed=bool(passed), detail=detail))
            logger.info(f"[{group}] {name}: {'pass' if passed else 'FAIL'} ({detail})")
    return results
