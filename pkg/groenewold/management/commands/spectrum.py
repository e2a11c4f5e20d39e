"""
Management command to write the eigenvalues of a Gaussian or uniform-ellipse density.

Gaussian values come from the closed form, uniform values from quadrature.
Rows are n = 0..n_max in Fock order.

Usage:
    python manage.py spectrum --family gaussian --s 3 --n-max 2
    python manage.py spectrum --family uniform --beta 2 --gamma 1 --n-max 40 --out uniform.csv
    python manage.py spectrum --family gaussian --s 0.5 --format json
"""
from __future__ import annotations

from groenewold.management.base import GroenewoldCommand
from groenewold.services import spectra
from groenewold.services.artifacts import render_frame, spectrum_frame, write_output
from groenewold.services.run_config import RunConfig


class Command(GroenewoldCommand):
    help = "Write the Groenewold eigenvalues of a Gaussian or uniform density (n,eigenvalue,method)."

    run_arguments = ("--family", "--s", "--beta", "--gamma", "--hbar", "--n-max", "--out", "--format")

    def run(self, config: RunConfig) -> None:
        config = config.for_spectrum()
        s = config.resolved_s()

        if config.family == "gaussian":
            values, method = spectra.gaussian_eigenvalues(s, config.n_max), "closed_form"
        else:
            values, method = spectra.uniform_eigenvalues(s, config.n_max), "quadrature"

        write_output(render_frame(spectrum_frame(values, method), config.format), config.out, self.stdout)
        if config.out is not None:
            self.stdout.write(
                self.style.SUCCESS(f"Wrote {len(values)} {config.family} eigenvalues (s={s:.6g}) to {config.out}")
            )
