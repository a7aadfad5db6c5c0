"""
Django settings for the groupsketch project.

groupsketch has no web surface: Django provides configuration, the cache
framework, management commands and the test runner.
"""

import os
from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='groupsketch-local-only')
DEBUG = config('DEBUG', default=False, cast=bool)
ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',

    # Local apps
    'apps.schemes',
    'apps.embedding',
    'apps.membership',
    'apps.bloom',
    'apps.experiments',
]

# Nothing is persisted; experiment outputs are plain CSV/JSON files.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True
TIME_ZONE = 'UTC'


# Cache: in-process by default, Redis when REDIS_URL is configured

REDIS_URL = config('REDIS_URL', default='')

if REDIS_URL:
    CACHES = {
        'default': {
            'BACKEND': 'django_redis.cache.RedisCache',
            'LOCATION': REDIS_URL,
            'OPTIONS': {
                'CLIENT_CLASS': 'django_redis.client.DefaultClient',
                'CONNECTION_POOL_KWARGS': {'max_connections': 50},
                'SOCKET_CONNECT_TIMEOUT': 5,
                'SOCKET_TIMEOUT': 5,
            },
            'KEY_PREFIX': 'groupsketch',
            'TIMEOUT': 3600,
        }
    }
else:
    CACHES = {
        'default': {
            'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
            'LOCATION': 'groupsketch',
            'KEY_PREFIX': 'groupsketch',
            'TIMEOUT': 3600,
            'OPTIONS': {'MAX_ENTRIES': 10000},
        }
    }


# Scheme / experiment tunables

GROUPSKETCH = {
    'TYPE_ENUMERATION_CAP': config('GROUPSKETCH_TYPE_CAP', default=1_000_000, cast=int),
    'THREADS': config('GROUPSKETCH_THREADS', default=os.cpu_count() or 1, cast=int),
    'SCHEMA_VERSION': 1,
    'DEFAULT_RUNS': config('GROUPSKETCH_RUNS', default=20, cast=int),
    'OPERATING_PFP': config('GROUPSKETCH_OPERATING_PFP', default=0.05, cast=float),
    'HISTOGRAM_BINS': 256,
    'CACHE_TIMEOUT': config('GROUPSKETCH_CACHE_TIMEOUT', default=3600, cast=int),
}


# Celery Configuration
# Runs execute in-process unless a worker pool is deployed behind a broker.
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379/0')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes
# Worker pools only; eager runs stay sequential
CELERY_WORKER_CONCURRENCY = GROUPSKETCH['THREADS']


REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}


LOG_LEVEL = config('GROUPSKETCH_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'groupsketch': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
