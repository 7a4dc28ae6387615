import os

from dotenv import load_dotenv


load_dotenv()

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure')

DEBUG = os.getenv('DEBUG', 'false').lower() == 'true'

VERSION = os.getenv('VERSION', 'v1.0.0-unspecified')

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'imaging',
    'discriminator',
    'lexicon',
    'semfilter',
    'wilss',
    'websource',
    'pipeline',
]

# Everything is file based: manifests, checkpoints and reports
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

LOG_LEVEL = os.getenv('CURATOR_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}

CURATOR = {
    # imaging
    'IMAGE_SIDE': int(os.getenv('CURATOR_IMAGE_SIDE', '224')),
    'SPECTRUM_GRID_SIZE': int(os.getenv('CURATOR_SPECTRUM_GRID_SIZE', '32')),
    'FEATURE_DOMAIN': os.getenv('CURATOR_FEATURE_DOMAIN', 'amplitude'),
    'PNG_ENABLED': os.getenv('CURATOR_PNG_ENABLED', 'true').lower() == 'true',

    # discriminator
    'DISCRIMINATOR_HIDDEN_DIMS': tuple(
        int(d) for d in
        os.getenv('CURATOR_DISCRIMINATOR_HIDDEN_DIMS', '1000,256').split(',')
    ),
    'DISCRIMINATOR_LEARNING_RATE': float(
        os.getenv('CURATOR_DISCRIMINATOR_LEARNING_RATE', '0.01')
    ),
    'DISCRIMINATOR_EPOCHS': int(os.getenv('CURATOR_DISCRIMINATOR_EPOCHS', '10')),
    'DISCRIMINATOR_BATCH_SIZE': int(
        os.getenv('CURATOR_DISCRIMINATOR_BATCH_SIZE', '24')
    ),

    # semantic filter
    'FILTER_THRESHOLD': float(os.getenv('CURATOR_FILTER_THRESHOLD', '0.6')),
    'FILTER_NOUN_COUNT': os.getenv('CURATOR_FILTER_NOUN_COUNT', '2'),

    # web budgets
    'PER_CLASS_CRAWL': int(os.getenv('CURATOR_PER_CLASS_CRAWL', '10000')),
    'PER_CLASS_KEEP': int(os.getenv('CURATOR_PER_CLASS_KEEP', '500')),
    'PER_CAPTION': int(os.getenv('CURATOR_PER_CAPTION', '20')),
    'REHEARSAL_PER_CLASS': int(os.getenv('CURATOR_REHEARSAL_PER_CLASS', '100')),

    # loss kernel
    'REHEARSAL_KDE_WEIGHT': float(os.getenv('CURATOR_REHEARSAL_KDE_WEIGHT', '0.5')),
    'SMOOTHING_ALPHA': float(os.getenv('CURATOR_SMOOTHING_ALPHA', '0.1')),
    'TOY_LEARNING_RATE': float(os.getenv('CURATOR_TOY_LEARNING_RATE', '0.05')),

    # concurrency
    'WORKERS': int(os.getenv('CURATOR_WORKERS', '4')),

    # external captioning service, disabled unless a base url is given
    'CAPTION_SERVICE_URL': os.getenv('CURATOR_CAPTION_SERVICE_URL', ''),
    'CAPTION_SERVICE_AUTH_HEADER': os.getenv(
        'CURATOR_CAPTION_SERVICE_AUTH_HEADER', 'Authorization'
    ),
    'CAPTION_SERVICE_AUTH_TOKEN': os.getenv('CURATOR_CAPTION_SERVICE_AUTH_TOKEN', ''),
    'CAPTION_SERVICE_TIMEOUT': float(
        os.getenv('CURATOR_CAPTION_SERVICE_TIMEOUT', '30')
    ),
    'CAPTION_SERVICE_RETRIES': int(os.getenv('CURATOR_CAPTION_SERVICE_RETRIES', '3')),
    'CAPTION_SERVICE_BACKOFF': float(
        os.getenv('CURATOR_CAPTION_SERVICE_BACKOFF', '0.5')
    ),
}
