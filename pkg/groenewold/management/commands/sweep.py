"""
Management command to tabulate spectral bounds against the classical uncertainty.

Each row holds Delta q Delta p / hbar (s/2 for Gaussians, s/4 for uniform
ellipses) and the smallest and largest eigenvalue. ``--family both`` writes
both families into one table, Gaussian rows first.

Usage:
    python manage.py sweep --family gaussian --s-min 0.1 --s-max 4 --steps 40
    python manage.py sweep --family uniform --s-min 0.1 --s-max 40 --steps 50 --jobs 4 --out uniform.csv
    python manage.py sweep --config figure.json --family both
"""
from __future__ import annotations

from groenewold.management.base import GroenewoldCommand
from groenewold.services import spectra
from groenewold.services.artifacts import render_frame, sweep_frame, write_output
from groenewold.services.run_config import RunConfig


class Command(GroenewoldCommand):
    help = "Write spectral bounds versus uncertainty_over_hbar for the Gaussian and/or uniform family."

    run_arguments = ("--family", "--n-max", "--s-min", "--s-max", "--steps", "--out", "--format", "--jobs")

    def run(self, config: RunConfig) -> None:
        config = config.for_sweep()
        s_values = config.s_values()

        result = spectra.SweepResult.combine(
            *(
                spectra.sweep(family, s_values, n_max=config.n_max, jobs=config.jobs)
                for family in config.sweep_families()
            )
        )

        write_output(render_frame(sweep_frame(result), config.format), config.out, self.stdout)
        if config.out is not None:
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(result.rows)} sweep rows to {config.out}"))
