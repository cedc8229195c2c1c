import os
from pathlib import Path
from dotenv import load_dotenv

PROJECT_PATH = Path(__file__).resolve().parent

load_dotenv(PROJECT_PATH / '.env')

DEBUG = False
SECRET_KEY = os.environ.get("SECRET_KEY", "fluxparity-local")

INSTALLED_APPS = [
    'django_fluxparity',
]

# No models; the app only needs settings, management commands and storage.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/4.0/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django_fluxparity': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# ------------------------------------------------------------------------------
DJANGO_FLUXPARITY = {
    'RESULTS_PATH': PROJECT_PATH / 'results',
}
