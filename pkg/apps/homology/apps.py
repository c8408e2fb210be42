from django.apps import AppConfig


class HomologyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.homology'
    verbose_name = 'Гомологии и нормальная форма Смита'
