from pathlib import Path
from decouple import Csv, config
from django.core.management.utils import get_random_secret_key

from rinehart import __version__

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config("SECRET_KEY", default=get_random_secret_key())
DEBUG = config("DEBUG", default=True, cast=bool)

ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="127.0.0.1,localhost,testserver", cast=Csv())

INSTALLED_APPS = [
    "rest_framework",
    "rinehart.apps.RinehartConfig",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "backend.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
            ],
        },
    },
]

WSGI_APPLICATION = "backend.wsgi.application"

REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "UNAUTHENTICATED_USER": None,
}

# No models: everything is computed in memory
DATABASES = {}

# ----- Engine tunables -----
RINEHART_TRUNCATION = config("RINEHART_TRUNCATION", default=12, cast=int)
RINEHART_MONOMIAL_ORDER = config("RINEHART_MONOMIAL_ORDER", default="grevlex")
RINEHART_MAX_REWRITE_STEPS = config("RINEHART_MAX_REWRITE_STEPS", default=1_000_000, cast=int)
RINEHART_ORACLE_PAIR_DEGREE = config("RINEHART_ORACLE_PAIR_DEGREE", default=3, cast=int)
RINEHART_SUITE_SAMPLES = config("RINEHART_SUITE_SAMPLES", default=200, cast=int)
RINEHART_SEED = config("RINEHART_SEED", default=0, cast=int)
RINEHART_SUITE_JOBS = config("RINEHART_SUITE_JOBS", default=1, cast=int)
RINEHART_LOG_LEVEL = config("RINEHART_LOG_LEVEL", default="WARNING")
RINEHART_VERSION = __version__

# ----- Logging -----
# Reports go to stdout, logs to stderr
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "{levelname} {name}: {message}", "style": "{"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "loggers": {
        "rinehart": {
            "handlers": ["console"],
            "level": RINEHART_LOG_LEVEL,
            "propagate": False,
        },
    },
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Security headers
if not DEBUG:
    SECURE_CONTENT_TYPE_NOSNIFF = True
    SECURE_PROXY_SSL_HEADER = ("HTTP_X_FORWARDED_PROTO", "https")

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True
