import logging

from django.core.management.base import BaseCommand, CommandError

from rinehart.cli import add_arguments, run
from rinehart.exceptions import UserError
from rinehart.reports import format_report
from rinehart.serializers import render_json

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Lie-Rinehart computations: logder, lr, pbw, hopf, sheaf, session and paper-suite."
    requires_system_checks = []

    def add_arguments(self, parser):
        add_arguments(parser)

    def handle(self, *args, **options):
        try:
            report = run(options)
        except UserError as e:
            logger.warning(f"{options.get('group')} {options.get('action') or ''}: {e}")
            raise CommandError(str(e), returncode=2)
        except Exception as e:
            logger.exception(f"Internal error in {options.get('group')}: {e}")
            raise CommandError(f"Internal error: {e}", returncode=3)

        if options.get("json"):
            self.stdout.write(render_json(report))
        else:
            self.stdout.write(format_report(report))

        if report.exit_code == 1:
            raise CommandError(f"{report.command}: {report.status}", returncode=1)
