from django.apps import AppConfig


class SemfilterConfig(AppConfig):
    name = 'semfilter'
