"""
Django settings for the graphstar project.

Numerical tolerances and caps for the verification suites live in the
GRAPHSTAR dict at the bottom; every entry can be overridden from the
environment.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('GRAPHSTAR_SECRET_KEY', 'django-insecure-graphstar-local-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv('GRAPHSTAR_DEBUG', '1') == '1'

ALLOWED_HOSTS = ["*"]

# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'core',
    'rest_framework',
    'drf_yasg'
]

SWAGGER_SETTINGS = {
    'USE_SESSION_AUTH': False,
    'SECURITY_DEFINITIONS': {},
}

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('GRAPHSTAR_DB_PATH', str(BASE_DIR / 'graphstar.sqlite3')),
    }
}

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'UNAUTHENTICATED_USER': None,
}

ROOT_URLCONF = 'graphstar.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'graphstar.wsgi.application'
ASGI_APPLICATION = 'graphstar.asgi.application'

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['console'],
            'level': os.getenv('GRAPHSTAR_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

# Verification tolerances and caps.
GRAPHSTAR = {
    'PSD_TOL': float(os.getenv('GRAPHSTAR_PSD_TOL', '1e-8')),
    'EQ_TOL': float(os.getenv('GRAPHSTAR_EQ_TOL', '1e-9')),
    'HERMITIAN_TOL': 1e-10,
    'CHOI_TOL': 1e-9,
    'COMMUTE_TOL': 1e-10,
    'QUOTIENT_CUTOFF': 1e-10,
    'COMPRESSION_TOL': 1e-8,
    'LX_SLACK': 1e-7,
    'JACOBI_TOL': 1e-13,
    'JACOBI_MAX_SWEEPS': 100,
    'LAURENT_BAND': int(os.getenv('GRAPHSTAR_LAURENT_BAND', '6')),
    'FOCK_CUTOFF': int(os.getenv('GRAPHSTAR_FOCK_CUTOFF', '4')),
    'FOCK_MAX_DIM': 5000,
    'CLASS_CAP': 100000,
    'BALL_CAP': 20000,
    'THREADS': int(os.getenv('GRAPHSTAR_THREADS', '1')),
    'ARTIFACT_DIR': os.getenv('GRAPHSTAR_ARTIFACT_DIR', str(BASE_DIR / 'artifacts')),
    'REPORT_SCHEMA_VERSION': 1,
}
