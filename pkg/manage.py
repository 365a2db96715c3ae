#!/usr/bin/env python
"""Entry point of the rinehart engine: `python manage.py rinehart <group> <action>`."""
import os
import sys


def main():
    """Run the engine's management commands (rinehart, test, runserver)."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'backend.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the pinned stack with "
            "`pip install -r requirements.txt` and check your PYTHONPATH."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
