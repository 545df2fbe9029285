from django.apps import AppConfig


class MoireConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.moire"
    verbose_name = "Flat-band interacting model"
