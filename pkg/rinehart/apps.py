# rinehart/apps.py
import logging

from django.apps import AppConfig
from django.core.exceptions import ImproperlyConfigured

logger = logging.getLogger(__name__)


class RinehartConfig(AppConfig):
    name = 'rinehart'
    verbose_name = "Lie-Rinehart engine"

    def ready(self):
        """
        Reject unusable tunables before any command runs
        """
        from .polyring import ORDER_KINDS
        from .utils import setting

        for name in ("RINEHART_TRUNCATION", "RINEHART_ORACLE_PAIR_DEGREE", "RINEHART_SEED"):
            value = setting(name)
            if not isinstance(value, int) or value < 0:
                raise ImproperlyConfigured(f"{name} must be a non-negative integer, got {value!r}")

        for name in ("RINEHART_MAX_REWRITE_STEPS", "RINEHART_SUITE_SAMPLES", "RINEHART_SUITE_JOBS"):
            value = setting(name)
            if not isinstance(value, int) or value < 1:
                raise ImproperlyConfigured(f"{name} must be a positive integer, got {value!r}")

        order = setting("RINEHART_MONOMIAL_ORDER")
        if order not in ORDER_KINDS:
            raise ImproperlyConfigured(
                f"RINEHART_MONOMIAL_ORDER must be one of {', '.join(ORDER_KINDS)}, got {order!r}"
            )
        logger.debug(f"rinehart ready: truncation {setting('RINEHART_TRUNCATION')}, order {order}")
