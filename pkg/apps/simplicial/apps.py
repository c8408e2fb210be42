from django.apps import AppConfig


class SimplicialConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.simplicial'
    verbose_name = 'Симплициальные множества'
