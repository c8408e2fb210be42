"""
Django settings for core project.

Проект без моделей и представлений: Django даёт реестр приложений, команды
управления, настройки и тестовый раннер; движок живёт в apps/*.
"""

import os

from decouple import config

PROJECT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
BASE_DIR = os.path.dirname(PROJECT_DIR)


# Application definition

INSTALLED_APPS = [
    'apps.simplicial',
    'apps.posets',
    'apps.bar',
    'apps.covers',
    'apps.segal',
    'apps.homology',
    'apps.affine',

    'rest_framework',
    'django.contrib.contenttypes',
    'django.contrib.auth',
]

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}


# Database
# Нужна только тестовому раннеру: все типы движка - неизменяемые значения.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.path.join(BASE_DIR, 'db.sqlite3'),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'ru'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Simplicial engine

SIMPLICIAL_DEFAULT_TRUNC = config('SIMPLICIAL_DEFAULT_TRUNC', default=3, cast=int)
EX_ENUMERATION_CAP = config('EX_ENUMERATION_CAP', default=10 ** 6, cast=int)
RLP_SQUARE_CAP = config('RLP_SQUARE_CAP', default=10 ** 6, cast=int)
WHITEHEAD_RLP_MAX_DIM = config('WHITEHEAD_RLP_MAX_DIM', default=3, cast=int)
SMITH_DENSE_LIMIT = config('SMITH_DENSE_LIMIT', default=64, cast=int)  # сторона матрицы
FIXTURES_DIR = config('FIXTURES_DIR', default=os.path.join(BASE_DIR, 'fixtures'))

# Имя -> максимальные грани; None - встроенные окружность, сфера и тор
REFERENCE_TRIANGULATIONS = None


# Celery Configuration
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379/0')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': config('SIMPLICIAL_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
        'core': {
            'handlers': ['console'],
            'level': config('SIMPLICIAL_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': True,
        },
    },
}
