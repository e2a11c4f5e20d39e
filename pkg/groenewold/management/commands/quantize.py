"""
Management command to quantise a density spec and report its matrix and eigenvalues.

The density must pass the normalisation gate first (exit 4 otherwise). The
JSON output is the matrix export (dim, s, hbar, entries, trace, tail_bound)
plus "eigenvalues" in descending order; ``--format csv`` writes only the
eigenvalues.

Usage:
    python manage.py quantize --density-spec gaussian.json --n-max 8
    python manage.py quantize --density-spec square.json --n-max 16 --jobs 4 --out square.json
"""
from __future__ import annotations

from groenewold.conf import get_numerics
from groenewold.exceptions import NormalizationError
from groenewold.management.base import GroenewoldCommand
from groenewold.services import densities, quantizer, spectra
from groenewold.services.artifacts import render_frame, render_payload, spectrum_frame, write_output
from groenewold.services.run_config import RunConfig


class Command(GroenewoldCommand):
    help = "Quantise a JSON density spec into a Groenewold matrix and write it with its eigenvalues."

    run_arguments = ("--density-spec", "--s", "--n-max", "--out", "--format", "--jobs")

    def run(self, config: RunConfig) -> None:
        config = config.for_quantize()
        density = config.load_density()

        residual = densities.normalization_residual(density)
        tolerance = get_numerics().normalization_tolerance
        if residual > tolerance:
            raise NormalizationError(
                f"density integrates to 1 +/- {residual:.6g} (tolerance {tolerance:.0e})"
            )

        matrix = quantizer.quantize_general(density, config.n_max, jobs=config.jobs)
        spectrum = spectra.eigendecompose(matrix)

        if config.format == "csv":
            text = render_frame(spectrum_frame(spectrum.eigenvalues, spectrum.method), "csv")
        else:
            payload = matrix.to_dict()
            payload["eigenvalues"] = [float(value) for value in spectrum.eigenvalues]
            text = render_payload(payload)

        write_output(text, config.out, self.stdout)
        if config.out is not None:
            self.stdout.write(
                self.style.SUCCESS(
                    f"Wrote {matrix.dim}x{matrix.dim} matrix to {config.out} "
                    f"(eigenvalues in [{spectrum.min_bound:.6g}, {spectrum.max_bound:.6g}])"
                )
            )
