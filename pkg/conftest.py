"""Configure Django before pytest collects the rinehart test modules."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "backend.settings")
django.setup()
