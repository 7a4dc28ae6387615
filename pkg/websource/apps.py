from django.apps import AppConfig


class WebsourceConfig(AppConfig):
    name = 'websource'
