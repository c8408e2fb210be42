# Celery-приложение загружается вместе с Django, чтобы shared_task
# в apps/*/tasks.py регистрировались в нём.
from .celery import app as celery_app

__all__ = ('celery_app',)
