from django.apps import AppConfig


class ScatteringConfig(AppConfig):
    name = 'scattering'
    verbose_name = 'Floquet scattering (eikonal and exact)'
