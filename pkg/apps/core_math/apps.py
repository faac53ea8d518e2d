from django.apps import AppConfig


class CoreMathConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.core_math'
