"""
Command dispatch shared by the `rinehart` management command and the HTTP
API: argparse subcommands, session and fixture loading, and the mapping of
every `<group> <action>` to a Report.
"""
import argparse
import json
import logging
import time

from .bialgebra import counit_axioms_check, normal_crossing_claim, re_axioms_check
from .derivation import (
    PRESENTATIONS,
    builtin_presentation,
    check_lr_axioms,
    format_derivation,
    is_logarithmic,
    log_derivation_report,
    normal_crossing_quotient,
)
from .exceptions import FixtureError, UnknownCommand, UserError
from .grammar import evaluate, parse, parse_expression
from .reports import Check, Report, check
from .serializers import MorphismSerializer, PresheafSerializer, load_morphism, load_presheaf
from .session import DerivationAlgebra, from_presentation, load, run_command, run_session
from .sheafkit import (
    SHAPES,
    chain_stalk_fixture,
    check_lemma_local_to_stalkwise,
    check_lemma_stalkwise_to_sheaf,
    empty_set_fixture,
    gluing_fixture,
    lemma1_fixture,
    minimal_cover,
    random_lemma1_fixture,
    random_lemma2_fixture,
    random_sheaf,
    randomized_lemma_suite,
    sheaf_check,
)
from .suite import ITEMS, run_suite
from .utils import make_rng

logger = logging.getLogger(__name__)

PRESHEAF_FIXTURES = {
    "empty-set": empty_set_fixture,
    "gluing": gluing_fixture,
    "chain-stalk": chain_stalk_fixture,
}
MORPHISM_FIXTURES = {
    "lemma1": lemma1_fixture,
}

ACTIONS = {
    "logder": ("solve", "check"),
    "lr": ("verify",),
    "pbw": ("nf", "mult", "symbol", "symmetrize"),
    "hopf": ("coproduct", "primitive", "level", "solve-primitives", "jets", "axioms", "claim"),
    "sheaf": ("check", "lemma1", "lemma2", "fixture"),
}


# ----------------------------
# Arguments
# ----------------------------
def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit the report as JSON.")
    common.add_argument("--timing", action="store_true", help="Add wall-clock timing to the report.")
    common.add_argument("--trunc", type=int, default=None, help="Operator-oracle truncation degree.")
    common.add_argument("--order", choices=("grevlex", "grlex", "lex"), default=None, help="Monomial order.")
    common.add_argument("--seed", type=int, default=None, help="Seed of randomized commands.")
    common.add_argument("--session", default=None, help="Path of a session file.")
    common.add_argument("--preset", choices=sorted(PRESENTATIONS), default=None, help="Built-in presentation.")
    common.add_argument("--el", action="append", default=[], help="Element expression (repeat for mult).")
    common.add_argument("--deg", type=int, default=None, help="Degree bound, symbol degree, level bound or jet order.")
    common.add_argument("--ring", default=None, help='Ring such as "Q[x,y]/(x*y)".')
    return common


def add_arguments(parser):
    common = _common()
    groups = parser.add_subparsers(dest="group", required=True)
    for group, actions in ACTIONS.items():
        group_parser = groups.add_parser(group)
        sub = group_parser.add_subparsers(dest="action", required=True)
        for action in actions:
            p = sub.add_parser(action, parents=[common])
            if group == "logder":
                p.add_argument("--der", action="append", default=[], help="Derivation such as x*dx.")
                p.add_argument("--reference", choices=sorted(PRESENTATIONS), default=None)
            if group == "hopf":
                p.add_argument("--length", type=int, default=2, help="Word length bound for solve-primitives.")
                p.add_argument("--samples", type=int, default=None)
            if group == "sheaf":
                p.add_argument("--fixture", default=None, help="Path of a JSON fixture.")
                p.add_argument("--builtin", default=None, help="Name of a built-in fixture.")
                p.add_argument("--random", type=int, default=None, help="Number of random fixtures.")
                p.add_argument("--shape", choices=sorted(SHAPES), default=None)
    session = groups.add_parser("session", parents=[common])
    session.set_defaults(action=None)
    suite = groups.add_parser("paper-suite", parents=[common])
    suite.add_argument("--samples", type=int, default=None)
    suite.add_argument("--jobs", type=int, default=None)
    suite.add_argument("--item", type=int, action="append", default=[], choices=range(1, len(ITEMS) + 1))
    suite.set_defaults(action=None)


# ----------------------------
# Loading
# ----------------------------
def _read(path, what):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UserError(f"Cannot read {what} '{path}': {e.strerror}")


def workspace(options):
    text = options.get("session_text")
    if text is None and options.get("session"):
        text = _read(options["session"], "session file")
    builtin = builtin_presentation(options["preset"]) if options.get("preset") else None
    if text is not None:
        return load(text, options.get("order"), builtin)
    if builtin is not None:
        return from_presentation(builtin)
    raise UserError("This command needs --session or --preset")


def ring_context(options):
    if not options.get("ring"):
        raise UserError('This command needs --ring, for example --ring "Q[x,y]/(x*y)"')
    return load(f"ring R = {options['ring']};", options.get("order")).ring


def _fixture_json(options):
    text = options.get("fixture_text")
    if text is None and options.get("fixture"):
        text = _read(options["fixture"], "fixture")
    if text is None:
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureError(f"Fixture is not valid JSON: {e}")


def _builtin(table, name):
    try:
        return table[name]()
    except KeyError:
        raise FixtureError(f"Unknown built-in fixture '{name}' (have {', '.join(table)})")


# ----------------------------
# Groups
# ----------------------------
def _element_command(options, name, count, integers=()):
    ws = workspace(options)
    elements = options.get("el") or []
    if len(elements) != count:
        raise UserError(f"`{name}` needs {count} --el argument(s), got {len(elements)}")
    args = [f"({e})" for e in elements] + [str(n) for n in integers]
    text = " ".join([name] + args) + ";"
    stmt = parse(text).statements[0]
    return run_command(ws, stmt, options.get("trunc"), source=text)


def _degree(options, default):
    return default if options.get("deg") is None else options["deg"]


def run_logder(action, options):
    ctx = ring_context(options)
    if action == "solve":
        reference = None
        if options.get("reference"):
            reference = builtin_presentation(options["reference"]).generators
        return log_derivation_report(ctx, _degree(options, 1), reference, options.get("reference") or "reference generators")
    if not options.get("der"):
        raise UserError("`logder check` needs at least one --der")
    report = Report(command=f"logder check {ctx}")
    algebra = DerivationAlgebra(ctx.ambient(), {})
    for text in options["der"]:
        D = algebra.as_derivation(evaluate(parse_expression(text), algebra, text))
        report.add(check(f"{format_derivation(D)} is logarithmic", is_logarithmic(D, ctx)))
    return report


def run_lr(action, options):
    return check_lr_axioms(workspace(options).presentation)


def run_pbw(action, options):
    if action == "nf":
        return _element_command(options, "nf", 1)
    if action == "mult":
        return _element_command(options, "mult", 2)
    return _element_command(options, action, 1, [_degree(options, 1)])


def run_hopf(action, options):
    if action == "coproduct":
        return _element_command(options, "coproduct", 1)
    if action == "primitive":
        return _element_command(options, "primitive", 1)
    if action == "level":
        return _element_command(options, "level", 1, [_degree(options, 4)])
    if action == "claim":
        return normal_crossing_claim(normal_crossing_quotient(), options.get("trunc"))
    ws = workspace(options)
    if action == "solve-primitives":
        stmt = parse(f"primitives {_degree(options, 1)} {options.get('length', 2)};").statements[0]
        return run_command(ws, stmt)
    if action == "jets":
        return run_command(ws, parse(f"jets {_degree(options, 2)};").statements[0])
    report = counit_axioms_check(ws.presentation, options.get("samples"), options.get("seed"))
    report.extend(re_axioms_check(ws.ring, options.get("samples"), options.get("seed")).checks)
    return report


def run_sheaf(action, options):
    data = _fixture_json(options)
    name = options.get("builtin")
    rng = make_rng(options.get("seed"))
    shape = options.get("shape") or "V"
    if action == "fixture":
        if name in MORPHISM_FIXTURES:
            result = MorphismSerializer(_builtin(MORPHISM_FIXTURES, name)).data
        elif name:
            result = PresheafSerializer(_builtin(PRESHEAF_FIXTURES, name)).data
        else:
            result = PresheafSerializer(random_sheaf(SHAPES[shape](), rng)).data
        return Report(command=f"sheaf fixture {name or shape}", result=result)
    if action == "check":
        if data is not None:
            return sheaf_check(load_presheaf(data))
        if name:
            return sheaf_check(_builtin(PRESHEAF_FIXTURES, name))
        return sheaf_check(random_sheaf(SHAPES[shape](), rng))
    if options.get("random"):
        shapes = [options["shape"]] if options.get("shape") else None
        return randomized_lemma_suite(shapes, options["random"], options.get("seed"))
    cover = None
    if data is not None:
        psi, cover = load_morphism(data)
    elif name:
        psi = _builtin(MORPHISM_FIXTURES, name)
    else:
        poset = SHAPES[shape]()
        psi = random_lemma1_fixture(poset, rng) if action == "lemma1" else random_lemma2_fixture(poset, rng)
    if action == "lemma1":
        return check_lemma_stalkwise_to_sheaf(psi)
    return check_lemma_local_to_stalkwise(psi, cover or minimal_cover(psi.source.poset))


def run_session_file(options):
    ws = workspace(options)
    reports = run_session(ws, options.get("trunc"))
    report = Report(command=f"session {options.get('session') or ws.ring_name}", result=reports)
    for n, item in enumerate(reports, start=1):
        witness = next((c.witness for c in item.failed_checks if c.witness), None)
        report.add(Check(f"{n}. {item.command}", item.status, witness))
    return report


GROUPS = {
    "logder": run_logder,
    "lr": run_lr,
    "pbw": run_pbw,
    "hopf": run_hopf,
    "sheaf": run_sheaf,
}


def run(options):
    """Dispatch parsed options to a Report; timing is attached only on request."""
    started = time.perf_counter()
    group = options.get("group")
    action = options.get("action")
    if group == "paper-suite":
        report = run_suite(options.get("samples"), options.get("seed"), options.get("trunc"),
                           options.get("jobs"), options.get("item") or None)
    elif group == "session":
        report = run_session_file(options)
    elif group in GROUPS and action in ACTIONS[group]:
        report = GROUPS[group](action, options)
    else:
        raise UnknownCommand(f"Unknown command: {' '.join(filter(None, (group, action)))}")
    if options.get("timing"):
        report.timing = time.perf_counter() - started
    logger.debug(f"{group} {action or ''}: {report.status}")
    return report
