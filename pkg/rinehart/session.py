"""
Evaluation of parsed sessions: the ring, the presentation built from the
`der`, `bracket` and `syz` declarations, named elements, and the reports of
the commands a session file contains.
"""
import logging
from dataclasses import dataclass, field

from .bialgebra import (
    UNDECIDED_AT_TRUNCATION,
    coproduct,
    is_primitive,
    jet_basis_check,
    primitive_filtration_level,
    solve_primitives,
)
from .derivation import (
    Derivation,
    LRPresentation,
    check_lr_axioms,
    fiber_rank,
    log_derivation_report,
)
from .enveloping import (
    UElement,
    commutator,
    counit,
    evaluate_operator,
    filtration_degree,
    multiply,
    power,
    symbol,
    symmetrize,
)
from .exceptions import DuplicateName, LengthMismatch, UnknownCommand, UserError
from .grammar import (
    Algebra,
    BracketDecl,
    Command,
    DerDecl,
    ElDecl,
    Num,
    PolyAlgebra,
    RingDecl,
    SyzDecl,
    evaluate,
    parse,
    parse_expression,
    render_statement,
)
from .polyring import MonomialOrder, RingCtx, reduce
from .reports import PASS, UNDECIDED, Check, Report

logger = logging.getLogger(__name__)


# ----------------------------
# Expression algebras
# ----------------------------
class DerivationAlgebra(PolyAlgebra):
    """Ring elements and derivations: `dx` is the partial derivative in x."""

    def __init__(self, ctx, derivations):
        super().__init__(ctx)
        self.derivations = derivations

    def name(self, ident):
        if ident in self.gens:
            return self.gens[ident]
        if ident in self.derivations:
            return self.derivations[ident]
        if ident.startswith("d") and ident[1:] in self.ctx.variables:
            return Derivation.partial_field(self.ctx, self.ctx.variables.index(ident[1:]))
        raise KeyError(ident)

    def as_derivation(self, value):
        if isinstance(value, Derivation):
            return value
        if not value:
            return Derivation.zero(self.ctx)
        raise UserError("A ring element cannot be added to a derivation")

    def add(self, a, b):
        if isinstance(a, Derivation) or isinstance(b, Derivation):
            return self.as_derivation(a) + self.as_derivation(b)
        return a + b

    def mul(self, a, b):
        if isinstance(a, Derivation) and isinstance(b, Derivation):
            raise UserError("Products of derivations are not derivations; use a `bracket` or an `el` binding")
        if isinstance(a, Derivation):
            return a.scale(b)
        if isinstance(b, Derivation):
            return b.scale(a)
        return a * b

    def pow(self, a, n):
        if isinstance(a, Derivation):
            raise UserError("Powers of derivations are not derivations")
        return a ** n


class CombinationAlgebra(PolyAlgebra):
    """Ring-linear combinations of generators, as coefficient lists."""

    def __init__(self, ctx, names):
        super().__init__(ctx)
        self.names = list(names)

    def name(self, ident):
        if ident in self.gens:
            return self.gens[ident]
        if ident in self.names:
            k = self.names.index(ident)
            return [self.ctx.one if i == k else self.ctx.zero for i in range(len(self.names))]
        raise KeyError(ident)

    def as_vector(self, value):
        if isinstance(value, list):
            return value
        if not value:
            return [self.ctx.zero] * len(self.names)
        raise UserError("A bracket value must be a combination of generators")

    def add(self, a, b):
        if isinstance(a, list) or isinstance(b, list):
            return [x + y for x, y in zip(self.as_vector(a), self.as_vector(b))]
        return a + b

    def neg(self, a):
        if isinstance(a, list):
            return [-x for x in a]
        return -a

    def mul(self, a, b):
        if isinstance(a, list) and isinstance(b, list):
            raise UserError("A bracket value must be linear in the generators")
        if isinstance(a, list):
            return [x * b for x in a]
        if isinstance(b, list):
            return [a * x for x in b]
        return a * b

    def pow(self, a, n):
        if isinstance(a, list):
            raise UserError("A bracket value must be linear in the generators")
        return a ** n


class ElementAlgebra(Algebra):
    """Elements of U: variables are ring elements, generator names are generators."""

    def __init__(self, pres, elements):
        self.pres = pres
        self.elements = elements

    def name(self, ident):
        if ident in self.elements:
            return self.elements[ident]
        if ident in self.pres.names:
            return UElement.generator(self.pres, self.pres.index(ident))
        ring = self.pres.ring
        if ident in ring.variables:
            return UElement.ring_element(self.pres, ring.gens[ring.variables.index(ident)])
        raise KeyError(ident)

    def number(self, value):
        return UElement.ring_element(self.pres, self.pres.ring.coerce(value))

    def mul(self, a, b):
        return multiply(a, b)

    def pow(self, a, n):
        return power(a, n)

    def commutator(self, a, b):
        return commutator(a, b)


# ----------------------------
# Workspace
# ----------------------------
@dataclass
class Workspace:
    """Everything a session declares, in declaration order."""

    session: object
    ring: RingCtx = None
    ring_name: str = ""
    derivations: dict = field(default_factory=dict)
    brackets: dict = field(default_factory=dict)
    syzygies: list = field(default_factory=list)
    elements: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)
    _presentation: LRPresentation = None

    @property
    def presentation(self):
        if self._presentation is None:
            if self.ring is None:
                raise UserError("The session declares no ring")
            if not self.derivations:
                raise UserError("The session declares no derivations")
            self._presentation = LRPresentation(
                self.ring,
                list(self.derivations),
                list(self.derivations.values()),
                self.brackets,
                self.syzygies,
                label=self.ring_name,
            )
        return self._presentation

    def where(self, stmt):
        line, column = self.session.position(stmt.loc)
        return f" (line {line}, column {column})" if line is not None else ""

    def taken(self, name):
        ring_names = self.ring.variables if self.ring else ()
        return name in ring_names or name in self.derivations or name in self.elements

    def element(self, node, source=None):
        if isinstance(node, str):
            node, source = parse_expression(node), node
        source = self.session.source if source is None else source
        return evaluate(node, ElementAlgebra(self.presentation, self.elements), source)

    def poly(self, node, source=None):
        source = self.session.source if source is None else source
        return evaluate(node, PolyAlgebra(self.ring), source)


def _integer(node, what):
    if not isinstance(node, Num) or node.value.denominator != 1 or node.value < 0:
        raise UserError(f"{what} must be a non-negative integer")
    return int(node.value)


def load(source, order=None, builtin=None):
    """Evaluate session text (or extend a built-in presentation) into a Workspace."""
    session = parse(source)
    ws = Workspace(session)
    if builtin is not None:
        _adopt(ws, builtin)
    for stmt in session.statements:
        if isinstance(stmt, RingDecl):
            if ws.ring is not None:
                raise DuplicateName(f"A second ring declaration '{stmt.name}'{ws.where(stmt)}")
            kind = order or stmt.order or MonomialOrder.default().kind
            ws.ring = RingCtx(stmt.variables, None, MonomialOrder(kind))
            if stmt.modulus is not None:
                ws.ring = ws.ring.quotient(ws.poly(stmt.modulus))
            ws.ring_name = stmt.name
            continue
        if ws.ring is None:
            raise UserError(f"The ring must be declared first{ws.where(stmt)}")
        if isinstance(stmt, (DerDecl, BracketDecl, SyzDecl)) and (ws._presentation is not None or ws.commands):
            raise UserError(f"Declarations must precede elements and commands{ws.where(stmt)}")
        if isinstance(stmt, DerDecl):
            if ws.taken(stmt.name):
                raise DuplicateName(f"'{stmt.name}' is already declared{ws.where(stmt)}")
            algebra = DerivationAlgebra(ws.ring, ws.derivations)
            value = evaluate(stmt.expr, algebra, session.source)
            ws.derivations[stmt.name] = algebra.as_derivation(value)
        elif isinstance(stmt, BracketDecl):
            names = list(ws.derivations)
            for name in (stmt.left, stmt.right):
                if name not in names:
                    raise UserError(f"Unknown generator '{name}' in bracket{ws.where(stmt)}")
            key = (names.index(stmt.left), names.index(stmt.right))
            if key in ws.brackets or key[::-1] in ws.brackets:
                raise DuplicateName(f"Bracket [{stmt.left},{stmt.right}] is declared twice{ws.where(stmt)}")
            algebra = CombinationAlgebra(ws.ring, names)
            ws.brackets[key] = tuple(algebra.as_vector(evaluate(stmt.expr, algebra, session.source)))
        elif isinstance(stmt, SyzDecl):
            if len(stmt.entries) != len(ws.derivations):
                raise LengthMismatch(
                    f"Syzygy with {len(stmt.entries)} entries for {len(ws.derivations)} generators{ws.where(stmt)}"
                )
            ws.syzygies.append(tuple(ws.poly(e) for e in stmt.entries))
        elif isinstance(stmt, ElDecl):
            if ws.taken(stmt.name):
                raise DuplicateName(f"'{stmt.name}' is already declared{ws.where(stmt)}")
            ws.elements[stmt.name] = ws.element(stmt.expr)
        elif isinstance(stmt, Command):
            ws.commands.append(stmt)
    logger.debug(f"session loaded: {len(ws.derivations)} generators, {len(ws.elements)} elements")
    return ws


def _adopt(ws, pres):
    ws.ring = pres.ring
    ws.ring_name = pres.label
    ws._presentation = pres
    ws.derivations = dict(zip(pres.names, pres.generators))


def from_presentation(pres):
    ws = Workspace(parse(""))
    _adopt(ws, pres)
    return ws


# ----------------------------
# Session commands
# ----------------------------
def _args(stmt, count):
    if len(stmt.args) != count:
        raise UserError(f"`{stmt.name}` takes {count} argument(s), got {len(stmt.args)}")
    return stmt.args


def run_command(ws, stmt, truncation=None, source=None):
    """One session command as a Report; ``source`` is the text the command was parsed from."""
    pres = ws.presentation
    report = Report(command=render_statement(stmt))
    name = stmt.name
    status = PASS

    def element(node):
        return ws.element(node, source)

    if name == "nf":
        (u,) = _args(stmt, 1)
        report.result = element(u)
    elif name == "mult":
        u, v = _args(stmt, 2)
        report.result = multiply(element(u), element(v))
    elif name == "symbol":
        u, n = _args(stmt, 2)
        report.result = symbol(element(u), _integer(n, "The symbol degree"))
    elif name == "symmetrize":
        u, n = _args(stmt, 2)
        report.result = symmetrize(symbol(element(u), _integer(n, "The symbol degree")))
    elif name == "counit":
        (u,) = _args(stmt, 1)
        report.result = counit(element(u))
    elif name == "eval":
        u, p = _args(stmt, 2)
        report.result = evaluate_operator(element(u), reduce(ws.poly(p, source), ws.ring), truncation)
    elif name == "coproduct":
        (u,) = _args(stmt, 1)
        report.result = coproduct(element(u))
    elif name == "primitive":
        (u,) = _args(stmt, 1)
        report.result = is_primitive(element(u))
        if report.result == UNDECIDED_AT_TRUNCATION:
            status = UNDECIDED
    elif name == "level":
        u, n = _args(stmt, 2)
        value = element(u)
        report.result = primitive_filtration_level(value, _integer(n, "The level bound"))
        report.notes.append(f"filtration degree {filtration_degree(value)}")
    elif name == "primitives":
        d, n = _args(stmt, 2)
        report.result = solve_primitives(pres, _integer(d, "The coefficient degree"), _integer(n, "The word length"))
    elif name == "verify":
        _args(stmt, 0)
        return _renamed(check_lr_axioms(pres), report.command)
    elif name == "fiber":
        point = [ws.poly(a, source) for a in _args(stmt, ws.ring.nvars)]
        if any(not p.is_ground for p in point):
            raise UserError("Fiber points must have rational coordinates")
        report.result = fiber_rank(pres, pres.syzygies, [p.LC if p else 0 for p in point])
    elif name == "logder":
        (d,) = _args(stmt, 1)
        degree = _integer(d, "The coefficient degree")
        return _renamed(log_derivation_report(ws.ring, degree, pres.generators, "declared generators"), report.command)
    elif name == "jets":
        (n,) = _args(stmt, 1)
        return _renamed(jet_basis_check(pres, _integer(n, "The jet order")), report.command)
    else:
        raise UnknownCommand(f"Unknown session command '{name}'")
    report.add(Check(name, status))
    return report


def _renamed(report, command):
    report.command = command
    return report


def run_session(ws, truncation=None):
    """Reports of every command in the session, in file order."""
    return [run_command(ws, stmt, truncation) for stmt in ws.commands]
