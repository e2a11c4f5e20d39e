"""
Management command to run the invariant suites and print a pass/fail table.

Exits 0 when every check passes and 1 otherwise.

Usage:
    python manage.py verify
    python manage.py verify --only kernel
    python manage.py verify --only quantizer,spectra
"""
from __future__ import annotations

from django.core.management.base import CommandError

from groenewold.management.base import EXIT_VERIFY_FAILURE, GroenewoldCommand
from groenewold.services.run_config import RunConfig
from groenewold.services.verification import run_suites


class Command(GroenewoldCommand):
    help = "Run the invariant suites (special_functions, densities, quantizer, spectra, kernel)."

    run_arguments = ("--only",)

    def run(self, config: RunConfig) -> None:
        results = run_suites(config.only)

        width = max(len(f"{result.group}: {result.name}") for result in results)
        self.stdout.write("=" * (width + 20))
        for result in results:
            label = f"{result.group}: {result.name}".ljust(width)
            status = self.style.SUCCESS("PASS") if result.passed else self.style.ERROR("FAIL")
            self.stdout.write(f"{label}  {status}  {result.detail}")
        self.stdout.write("=" * (width + 20))

        failed = [result for result in results if not result.passed]
        if failed:
            raise CommandError(
                f"{len(failed)} of {len(results)} checks failed", returncode=EXIT_VERIFY_FAILURE
            )
        self.stdout.write(self.style.SUCCESS(f"All {len(results)} checks passed."))
