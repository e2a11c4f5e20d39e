from django.apps import AppConfig


class GroenewoldConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "groenewold"
    verbose_name = "Groenewold spectra"
