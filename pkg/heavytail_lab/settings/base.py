from pathlib import Path
from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config('SECRET_KEY', default='htstab-local-only-not-secret')
DEBUG = config('DEBUG', default=False, cast=bool)
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'apps.core_math',
    'apps.noise',
    'apps.problems',
    'apps.optimizers',
    'apps.stability',
    'apps.experiments',
]

# No experiment database: every artifact is a file under HTSTAB_OUTPUT_DIR.
DATABASES = {}

TIME_ZONE = 'UTC'
USE_TZ = True
LANGUAGE_CODE = 'en-us'
USE_I18N = False
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Experiment defaults
HTSTAB_OUTPUT_DIR = config('HTSTAB_OUTPUT_DIR', default=str(BASE_DIR / 'htstab-output'))
HTSTAB_DEFAULT_SEED = config('HTSTAB_DEFAULT_SEED', default=20240601, cast=int)
HTSTAB_SCHEDULE_SCALE = config('HTSTAB_SCHEDULE_SCALE', default=1.0, cast=float)
HTSTAB_PROBE_COUNT = config('HTSTAB_PROBE_COUNT', default=64, cast=int)
HTSTAB_BOOTSTRAP_RESAMPLES = config('HTSTAB_BOOTSTRAP_RESAMPLES', default=1000, cast=int)
HTSTAB_HOLDOUT_SIZE = config('HTSTAB_HOLDOUT_SIZE', default=100_000, cast=int)
# Upper bound on sweep cells running at once (process pool size)
HTSTAB_PARALLELISM = config('HTSTAB_PARALLELISM', default=1, cast=int)
HTSTAB_LOG_LEVEL = config('HTSTAB_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '[%(levelname)s] %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'ERROR',
            'propagate': False,
        },
        'apps': {
            'handlers': ['console'],
            'level': HTSTAB_LOG_LEVEL,
            'propagate': False,
        },
    },
}
