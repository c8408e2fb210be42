from django.apps import AppConfig


class AffineConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.affine'
    verbose_name = 'Расширенные аффинные симплексы'
