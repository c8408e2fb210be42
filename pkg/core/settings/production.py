from .base import *
from decouple import config

DEBUG = False
SECRET_KEY = config('SECRET_KEY', default='your-secret-key-here')

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost', cast=lambda v: [s.strip() for s in v.split(',')])

# Redis для Celery
REDIS_URL = config('REDIS_URL', default='redis://localhost:6379/0')

CELERY_BROKER_URL = REDIS_URL
CELERY_RESULT_BACKEND = REDIS_URL

# Конвейеры долгие: по одной задаче на воркер
CELERY_WORKER_PREFETCH_MULTIPLIER = 1
CELERY_WORKER_MAX_TASKS_PER_CHILD = 100
CELERY_TASK_ACKS_LATE = True
CELERY_TASK_REJECT_ON_WORKER_LOST = True
CELERY_TASK_ALWAYS_EAGER = False
CELERY_BROKER_CONNECTION_RETRY_ON_STARTUP = True
CELERY_RESULT_EXPIRES = 24 * 3600

LOG_DIR = config('LOG_DIR', default='/var/log/simplicial')

# Логирование для продакшена
LOGGING['handlers']['file'] = {
    'level': 'INFO',
    'class': 'logging.handlers.RotatingFileHandler',
    'filename': os.path.join(LOG_DIR, 'simplicial.log'),
    'maxBytes': 1024 * 1024 * 5,  # 5 MB
    'backupCount': 5,
    'formatter': 'verbose',
}
LOGGING['handlers']['celery_file'] = {
    'level': 'INFO',
    'class': 'logging.handlers.RotatingFileHandler',
    'filename': os.path.join(LOG_DIR, 'celery.log'),
    'maxBytes': 1024 * 1024 * 5,  # 5 MB
    'backupCount': 5,
    'formatter': 'verbose',
}
LOGGING['handlers']['console']['level'] = 'WARNING'
for name in ('apps', 'core'):
    LOGGING['loggers'][name].update(handlers=['file', 'console'], level='INFO')
LOGGING['loggers']['celery']['handlers'] = ['celery_file', 'console']
