# rinehart/reports.py
import logging
from dataclasses import dataclass, field

from sympy.polys.rings import PolyElement

from .polyring import format_poly
from .utils import setting

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
UNDECIDED = "undecided"
HYPOTHESIS_VIOLATED = "hypothesis violated"

STATUSES = (PASS, FAIL, UNDECIDED, HYPOTHESIS_VIOLATED)


@dataclass
class Check:
    """One verified statement inside a report."""

    name: str
    status: str
    witness: str = None
    detail: str = ""

    @property
    def failed(self):
        return self.status == FAIL


def check(name, ok, witness=None, detail=""):
    """Build a pass/fail Check; the witness is only kept on failure."""
    if ok:
        return Check(name, PASS, None, detail)
    return Check(name, FAIL, witness, detail)


def combine_status(statuses):
    """
    A failure anywhere fails the whole; a report made only of undecided
    entries is undecided; anything else passes.
    """
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if statuses and all(s == UNDECIDED for s in statuses):
        return UNDECIDED
    return PASS


@dataclass
class Report:
    """Machine-readable outcome of one command."""

    command: str
    checks: list = field(default_factory=list)
    result: object = None
    notes: list = field(default_factory=list)
    timing: float = None
    version: str = field(default_factory=lambda: setting("RINEHART_VERSION"))
    status: str = None

    def __post_init__(self):
        if self.status is None:
            self.status = combine_status(c.status for c in self.checks)

    def add(self, item):
        self.checks.append(item)
        self.status = combine_status(c.status for c in self.checks)
        return item

    def extend(self, items):
        for item in items:
            self.add(item)

    @property
    def failed_checks(self):
        return [c for c in self.checks if c.failed]

    @property
    def exit_code(self):
        return 1 if self.status == FAIL else 0


# ----------------------------
# Text rendering
# ----------------------------
def _result_lines(value, indent):
    pad = " " * indent
    if isinstance(value, Report):
        return format_report(value, indent).splitlines()
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (list, dict, Report)):
                lines.append(f"{pad}{key}:")
                lines.extend(_result_lines(item, indent + 2))
            else:
                lines.append(f"{pad}{key}: {_text(item)}")
        return lines
    if isinstance(value, (list, tuple)):
        lines = []
        for item in value:
            lines.extend(_result_lines(item, indent))
        return lines
    return [f"{pad}{_text(value)}"]


def _text(value):
    if isinstance(value, PolyElement):
        return format_poly(value)
    return str(value)


def format_report(report, indent=0):
    """Human rendering of a report; JSON output renders the same object."""
    pad = " " * indent
    lines = [f"{pad}{report.command}: {report.status}"]
    for c in report.checks:
        line = f"{pad}  [{c.status}] {c.name}"
        if c.detail:
            line += f" ({c.detail})"
        if c.witness:
            line += f"  witness: {c.witness}"
        lines.append(line)
    if report.result is not None:
        lines.append(f"{pad}  result:")
        lines.extend(_result_lines(report.result, indent + 4))
    for note in report.notes:
        lines.append(f"{pad}  note: {note}")
    if report.timing is not None:
        lines.append(f"{pad}  timing: {report.timing:.3f}s")
    return "\n".join(lines)
