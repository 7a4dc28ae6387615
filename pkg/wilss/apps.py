from django.apps import AppConfig


class WilssConfig(AppConfig):
    name = 'wilss'
