"""
Celery-приложение для долгих проверок: конвейер нерв-теоремы, RLP для φ
и сравнение бар-конструкций. Вход и результат задач - JSON.
"""
import os
from celery import Celery
from django.conf import settings

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings.dev')

app = Celery('simplicial')

# Параметры CELERY_* берутся из core.settings (лимиты перебора там же)
app.config_from_object('django.conf:settings', namespace='CELERY')

# apps.covers.tasks и apps.bar.tasks
app.autodiscover_tasks(lambda: settings.INSTALLED_APPS)

app.conf.update(
    task_serializer='json',
    accept_content=['json'],
    result_serializer='json',
    enable_utc=True,
    task_track_started=True,
    # Ex до уровня 3 и RLP при n = 3 укладываются с запасом
    task_time_limit=30 * 60,
    task_soft_time_limit=29 * 60,
    worker_prefetch_multiplier=1,
    broker_connection_retry_on_startup=True,
)

# Конвейеры - в очереди pipelines, остальное - в default
app.conf.task_routes = {
    'apps.covers.tasks.run_whitehead_pipeline': {'queue': 'pipelines'},
    'apps.covers.tasks.run_rlp_check': {'queue': 'pipelines'},
    'apps.bar.tasks.run_bar_comparison': {'queue': 'pipelines'},
}

app.conf.task_default_queue = 'default'
app.conf.task_queues = {
    'default': {
        'exchange': 'default',
        'routing_key': 'default',
    },
    'pipelines': {
        'exchange': 'pipelines',
        'routing_key': 'pipelines',
    },
}
