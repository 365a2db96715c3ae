# rinehart/views.py
import json
import logging

from django.core.management.base import CommandError, CommandParser
from rest_framework import status
from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from . import __version__
from .cli import ACTIONS, add_arguments, run
from .exceptions import InternalError, UserError
from .serializers import ReportSerializer
from .suite import ITEMS

logger = logging.getLogger(__name__)


def _parse_argv(argv):
    parser = CommandParser(prog="rinehart", called_from_command_line=False)
    add_arguments(parser)
    return vars(parser.parse_args(argv))


def _report_response(options):
    try:
        report = run(options)
    except UserError as e:
        logger.warning(f"Rejected request: {e}")
        return Response({"detail": str(e)}, status=status.HTTP_400_BAD_REQUEST)
    except (InternalError, RecursionError) as e:
        logger.error(f"Internal error: {e}")
        return Response({"detail": f"Internal error: {e}"}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
    return Response(ReportSerializer(report).data, status=status.HTTP_200_OK)


@api_view(["GET"])
@permission_classes([AllowAny])
def api_root(request):
    return Response({
        "version": __version__,
        "commands": {group: list(actions) for group, actions in ACTIONS.items()},
        "suite": [f"{n}. {title}" for n, (title, _) in enumerate(ITEMS, start=1)],
        "endpoints": {
            "run": request.build_absolute_uri("run/"),
            "paper-suite": request.build_absolute_uri("paper-suite/"),
        },
    })


@api_view(["POST"])
@permission_classes([AllowAny])
def run_command(request):
    """
    Run one CLI command against inline data.

    Body: {"command": ["pbw", "nf", "--el", "..."], "session": "...", "fixture": {...}}
    File paths are never read on this surface; --session and --fixture are ignored.
    """
    argv = request.data.get("command")
    if not isinstance(argv, list) or not all(isinstance(a, str) for a in argv) or not argv:
        return Response({"detail": "`command` must be a non-empty list of strings."},
                        status=status.HTTP_400_BAD_REQUEST)
    try:
        options = _parse_argv(argv)
    except CommandError as e:
        return Response({"detail": str(e)}, status=status.HTTP_400_BAD_REQUEST)

    options["session"] = None
    options["fixture"] = None
    options["session_text"] = request.data.get("session")
    fixture = request.data.get("fixture")
    if fixture is not None:
        options["fixture_text"] = fixture if isinstance(fixture, str) else json.dumps(fixture)
    return _report_response(options)


@api_view(["GET"])
@permission_classes([AllowAny])
def paper_suite(request):
    try:
        options = {
            "group": "paper-suite",
            "samples": _int_param(request, "samples"),
            "seed": _int_param(request, "seed"),
            "jobs": _int_param(request, "jobs"),
            "trunc": _int_param(request, "trunc"),
            "item": [int(n) for n in request.query_params.getlist("item")],
            "timing": request.query_params.get("timing") in ("1", "true"),
        }
    except ValueError as e:
        return Response({"detail": f"Bad query parameter: {e}"}, status=status.HTTP_400_BAD_REQUEST)
    if any(n < 1 or n > len(ITEMS) for n in options["item"]):
        return Response({"detail": f"`item` must lie between 1 and {len(ITEMS)}."},
                        status=status.HTTP_400_BAD_REQUEST)
    return _report_response(options)


def _int_param(request, name):
    value = request.query_params.get(name)
    return None if value in (None, "") else int(value)
