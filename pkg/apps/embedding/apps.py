from django.apps import AppConfig


class EmbeddingAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.embedding'
    verbose_name = 'Random-projection embedding'
