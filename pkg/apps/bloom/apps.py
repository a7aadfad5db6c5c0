from django.apps import AppConfig


class BloomConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.bloom'
    verbose_name = 'Bloom filter baseline'
