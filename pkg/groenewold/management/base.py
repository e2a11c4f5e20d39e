"""
Shared plumbing for the groenewold management commands.

``GroenewoldCommand`` declares the common flags and turns service exceptions
into ``CommandError`` with the documented exit codes:

    0 ok, 1 verify failure, 2 config error, 3 numerical failure, 4 normalisation failure
"""
from __future__ import annotations

import logging

from django.core.management.base import BaseCommand, CommandError

from groenewold.exceptions import ConfigurationError, NormalizationError, NumericalError
from groenewold.services.run_config import RunConfig

logger = logging.getLogger(__name__)

EXIT_VERIFY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_NORMALIZATION_FAILURE = 4

# flag -> argparse keyword arguments; every default is None so a --config file can fill it
RUN_ARGUMENTS = {
    "--family": {"help": "Density family: gaussian or uniform (sweep also accepts both)."},
    "--s": {"type": float, "help": "Dimensionless s = beta*gamma/hbar."},
    "--beta": {"type": float, "help": "Position scale beta (with --gamma, instead of --s)."},
    "--gamma": {"type": float, "help": "Momentum scale gamma (with --beta, instead of --s)."},
    "--hbar": {"type": float, "help": "Action unit hbar (default: 1)."},
    "--n-max": {"type": int, "help": "Highest Fock index kept."},
    "--s-min": {"type": float, "help": "Smallest s of a sweep."},
    "--s-max": {"type": float, "help": "Largest s of a sweep."},
    "--steps": {"type": int, "help": "Number of evenly spaced s values in a sweep (>= 2)."},
    "--density-spec": {"help": "Path to a JSON density spec."},
    "--out": {"help": "Output file (default: stdout)."},
    "--format": {"choices": ["csv", "json"], "help": "Output format (default: csv)."},
    "--jobs": {"type": int, "help": "Worker threads (default: 1)."},
    "--only": {"action": "append", "help": "Restrict verify to a group; repeat or comma-separate."},
}


class GroenewoldCommand(BaseCommand):
    """Base command: subclasses list their flags in ``run_arguments`` and implement ``run``."""

    run_arguments: tuple[str, ...] = ()

    def add_arguments(self, parser):
        for flag in self.run_arguments:
            parser.add_argument(flag, default=None, **RUN_ARGUMENTS[flag])
        parser.add_argument(
            "--config",
            default=None,
            help="JSON file with default values for the flags above (flags win).",
        )

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options(options)
            self.run(config)
        except CommandError:
            raise
        except ConfigurationError as exc:
            raise CommandError(f"Configuration error: {exc}", returncode=EXIT_CONFIG_ERROR) from exc
        except NormalizationError as exc:
            raise CommandError(f"Normalisation gate failed: {exc}", returncode=EXIT_NORMALIZATION_FAILURE) from exc
        except NumericalError as exc:
            raise CommandError(f"Numerical failure: {exc}", returncode=EXIT_NUMERICAL_FAILURE) from exc
        except ValueError as exc:
            raise CommandError(f"Invalid input: {exc}", returncode=EXIT_CONFIG_ERROR) from exc

    def run(self, config: RunConfig) -> None:
        raise NotImplementedError
