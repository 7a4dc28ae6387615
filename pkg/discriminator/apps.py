from django.apps import AppConfig


class DiscriminatorConfig(AppConfig):
    name = 'discriminator'
