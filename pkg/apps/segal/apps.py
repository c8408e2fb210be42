from django.apps import AppConfig


class SegalConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.segal'
    verbose_name = 'Условия Сигала'
