from django.apps import AppConfig


class SchemesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.schemes'
    verbose_name = 'Aggregation schemes and figures of merit'
