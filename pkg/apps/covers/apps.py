from django.apps import AppConfig


class CoversConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.covers'
    verbose_name = 'Покрытия и нерв Чеха'
