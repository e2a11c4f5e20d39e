"""
Django settings for the spectralab project.

The project hosts a single app, ``groenewold``, whose services compute
Groenewold operators and their spectra and whose management commands form
the command-line surface. There are no views, models or migrations; Django
supplies the command framework, configuration and the test runner.

Every numerical tunable can be overridden from the environment (or a ``.env``
file next to ``manage.py``) with a ``GROENEWOLD_<NAME>`` variable.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / ".env")


SECRET_KEY = os.getenv("SECRET_KEY", "spectralab-insecure-local-key")

DEBUG = os.getenv("DEBUG", "False").lower() in ("true", "1", "yes")

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    "groenewold",
]

# Nothing is persisted; SQLite keeps Django's test runner and checks happy.
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": Path(os.getenv("DATABASE_PATH", BASE_DIR / "db.sqlite3")),
    }
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(f"GROENEWOLD_{name}", default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(f"GROENEWOLD_{name}", default))


# Numerical configuration read by groenewold.conf.get_numerics()
GROENEWOLD = {
    # Two-resolution quadrature refinement
    "quadrature_rtol": _env_float("QUADRATURE_RTOL", 1e-9),
    "quadrature_atol": _env_float("QUADRATURE_ATOL", 1e-12),
    "quadrature_max_points": _env_int("QUADRATURE_MAX_POINTS", 4096),
    # Matrix construction gates
    "imaginary_tolerance": _env_float("IMAGINARY_TOLERANCE", 1e-8),
    "trace_tolerance": _env_float("TRACE_TOLERANCE", 1e-8),
    "trace_tail_factor": _env_float("TRACE_TAIL_FACTOR", 8.0),
    "normalization_tolerance": _env_float("NORMALIZATION_TOLERANCE", 1e-6),
    # Gaussian densities are integrated out to this many widths
    "gaussian_radius_cutoff": _env_float("GAUSSIAN_RADIUS_CUTOFF", 7.0),
    # Coordinate-space kernel grid
    "kernel_grid_points": _env_int("KERNEL_GRID_POINTS", 2048),
    "kernel_grid_widths": _env_float("KERNEL_GRID_WIDTHS", 8.0),
    # Cyclic Jacobi eigensolver
    "jacobi_tolerance": _env_float("JACOBI_TOLERANCE", 1e-12),
    "jacobi_max_sweeps": _env_int("JACOBI_MAX_SWEEPS", 100),
}


# Logging: CSV goes to stdout, so service logs stay on stderr and quiet by default.

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "{levelname} {name}: {message}", "style": "{"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "simple",
        },
    },
    "loggers": {
        "groenewold": {
            "handlers": ["console"],
            "level": os.getenv("LOG_LEVEL", "WARNING"),
        },
    },
}
