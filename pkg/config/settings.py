"""
Django settings for config project.

Generated by 'django-admin startproject' using Django 4.2.9

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os, math
from pathlib        import Path
from dotenv         import load_dotenv
from str2bool       import str2bool

load_dotenv()  # take environment variables from .env.

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'Super_Secr3t_9999')

# Enable/Disable DEBUG Mode
DEBUG = str2bool(os.environ.get('DEBUG')) or False

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",

    "rest_framework",

    "apps.moire",
]

# Database
# https://docs.djangoproject.com/en/4.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.path.join(BASE_DIR, 'db.sqlite3'),
    }
}

# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/4.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# ### Logging ###

FBI_LOG_LEVEL = os.environ.get('FBI_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps.moire': {
            'handlers': ['console'],
            'level': FBI_LOG_LEVEL,
            'propagate': False,
        },
    },
}
########################################

def _env_float( aName, aDefault ):
    value = os.environ.get( aName )
    return float( value ) if value else aDefault

def _env_int( aName, aDefault ):
    value = os.environ.get( aName )
    return int( value ) if value else aDefault

def _env_bool( aName, aDefault ):
    value = str2bool( os.environ.get( aName ) )
    return aDefault if value is None else value

# ### FBI model Settings ###
MOIRE = {
    'CUTOFF'           : _env_float( 'FBI_CUTOFF'          , 12.0                 ),
    'G_CUTOFF'         : _env_float( 'FBI_G_CUTOFF'        , 4 * math.sqrt(3.0)   ),
    'FLAT_TOL'         : _env_float( 'FBI_FLAT_TOL'        , 1e-6                 ),
    'DETECT_TOL'       : _env_float( 'FBI_DETECT_TOL'      , 1e-7                 ),
    'MULTIPLICITY_TOL' : _env_float( 'FBI_MULTIPLICITY_TOL', 1e-5                 ),
    'REAL_TOL'         : _env_float( 'FBI_REAL_TOL'        , 1e-4                 ),
    'DEDUP_TOL'        : _env_float( 'FBI_DEDUP_TOL'       , 1e-5                 ),
    'ALPHA_MAX'        : _env_float( 'FBI_ALPHA_MAX'       , 6.0                  ),
    'NONZERO_TOL'      : _env_float( 'FBI_NONZERO_TOL'     , 1e-6                 ),
    'ED_MAX_MODES'     : _env_int  ( 'FBI_ED_MAX_MODES'    , 16                   ),
    'ED_DENSE_MAX'     : _env_int  ( 'FBI_ED_DENSE_MAX'    , 4096                 ),
    'EPSILON'          : _env_float( 'FBI_EPSILON'         , 1.0                  ),
    'GATE_D'           : _env_float( 'FBI_GATE_D'          , 1.0                  ),
    'THREADS'          : _env_int  ( 'FBI_THREADS'         , 1                    ),
    'SEED'             : _env_int  ( 'FBI_SEED'            , 0                    ),
    'STRICT_SYMMETRY'  : _env_bool ( 'FBI_STRICT_SYMMETRY' , True                 ),
}
########################################
