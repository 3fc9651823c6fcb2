"""
Django settings for the floquetea project.

The project is driven from the command line only (``manage.py sigma``,
``sweep``, ``amplitude``, ``validate``); there is no web front end and no
database. Settings carry the process-wide numerical defaults and the logging
setup. Everything that varies per run lives in a RunConfig file instead.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Nothing is signed or served; Django only insists on a non-empty key.
SECRET_KEY = os.getenv('FLOQUETEA_SECRET_KEY', 'floquetea-batch-only-not-secret')

DEBUG = False


# Application definition

INSTALLED_APPS = [
    'scattering',
]

# No models: computations only write their own output files.
DATABASES = {}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Numerical tolerance profiles
# The active one is picked with FLOQUETEA_TOLERANCE_PROFILE (strict|default|fast).

TOLERANCE_PROFILE = os.getenv('FLOQUETEA_TOLERANCE_PROFILE', 'default')

TOLERANCE_PROFILES = {
    'strict': {
        'abs_tol': 1e-12,
        'rel_tol': 1e-12,
        'max_depth': 50,
        't_nodes': 128,
        'exact_tol': 1e-9,
    },
    'default': {
        'abs_tol': 1e-10,
        'rel_tol': 1e-10,
        'max_depth': 40,
        't_nodes': 64,
        'exact_tol': 1e-7,
    },
    'fast': {
        'abs_tol': 1e-7,
        'rel_tol': 1e-7,
        'max_depth': 30,
        't_nodes': 32,
        'exact_tol': 1e-5,
    },
}

# Sweep rows run in a process pool of this size.
SWEEP_WORKERS = int(os.getenv('FLOQUETEA_SWEEP_WORKERS', os.cpu_count() or 1))


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'scattering': {
            'handlers': ['console'],
            'level': os.getenv('FLOQUETEA_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
