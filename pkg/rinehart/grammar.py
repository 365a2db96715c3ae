"""
The session language.

    ring R = Q[x,y] / (x*y) order grevlex;
    der a = x*dx;
    der b = y*dy;
    bracket [a,b] = 0;
    syz (y, 0);
    el u = a*b + 2*a;
    nf u;

Expressions use + - * ^, rational literals like 3/2, parentheses and the
commutator [u,v]; `*` may be omitted between factors. Comments run from
`#` to the end of the line.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from pyparsing import (
    Forward,
    Group,
    Keyword,
    MatchFirst,
    Optional,
    ParseBaseException,
    ParseFatalException,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    col,
    delimited_list,
    lineno,
    nums,
    one_of,
    python_style_comment,
)

from .exceptions import ParseError, UnknownIdentifier, UserError

logger = logging.getLogger(__name__)

COMMANDS = (
    "nf", "mult", "symbol", "symmetrize", "counit", "eval", "coproduct", "primitive",
    "level", "primitives", "verify", "fiber", "logder", "jets",
)
RESERVED = {"ring", "der", "bracket", "syz", "el", "order", "Q"} | set(COMMANDS)
ORDERS = ("grevlex", "grlex", "lex")


# ----------------------------
# AST
# ----------------------------
@dataclass(frozen=True)
class Num:
    value: Fraction
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Mul:
    factors: tuple
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Add:
    """Signed terms; a lone term is only wrapped when its sign is '-'."""

    terms: tuple
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Paren:
    inner: object
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Commutator:
    left: object
    right: object
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class RingDecl:
    name: str
    variables: tuple
    modulus: object = None
    order: str = None
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class DerDecl:
    name: str
    expr: object
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class BracketDecl:
    left: str
    right: str
    expr: object
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class SyzDecl:
    entries: tuple
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class ElDecl:
    name: str
    expr: object
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple = ()
    loc: int = field(default=None, compare=False)


@dataclass(frozen=True)
class SessionFile:
    statements: tuple
    source: str = field(default="", compare=False, repr=False)

    def declarations(self, kind):
        return [s for s in self.statements if isinstance(s, kind)]

    def position(self, loc):
        if loc is None or not self.source:
            return None, None
        return lineno(loc, self.source), col(loc, self.source)


# ----------------------------
# Grammar
# ----------------------------
def _number(s, loc, toks):
    denominator = toks[0].partition("/")[2]
    if denominator and int(denominator) == 0:
        raise ParseFatalException(s, loc, "zero denominator")
    return Num(Fraction(toks[0]), loc=loc)


def _signed(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    if toks[0] == "-":
        return Add((("-", toks[1]),), loc=loc)
    return toks[1]


def _power(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    return Pow(toks[0], int(toks[1]), loc=loc)


def _mul(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    return Mul(tuple(toks), loc=loc)


def _add(s, loc, toks):
    toks = list(toks)
    sign = "+"
    if isinstance(toks[0], str):
        sign = toks.pop(0)
    terms = [(sign, toks[0])]
    for i in range(1, len(toks), 2):
        terms.append((toks[i], toks[i + 1]))
    if len(terms) == 1 and sign == "+":
        return terms[0][1]
    return Add(tuple(terms), loc=loc)


@lru_cache(maxsize=None)
def make_grammar():
    LPAR, RPAR = Suppress("("), Suppress(")")
    LBRACK, RBRACK = Suppress("["), Suppress("]")
    COMMA, SEMI, EQ = Suppress(","), Suppress(";"), Suppress("=")

    ident = Word(alphas + "_", alphanums + "_")
    ident.add_condition(lambda toks: toks[0] not in RESERVED, message="reserved word")
    integer = Word(nums)

    expr = Forward()
    number = Regex(r"\d+(?:/\d+)?").set_parse_action(_number)
    name = ident.copy().add_parse_action(lambda s, l, t: Name(t[0], loc=l))
    paren = (LPAR + expr + RPAR).set_parse_action(lambda s, l, t: Paren(t[0], loc=l))
    commutator = (LBRACK + expr + COMMA + expr + RBRACK).set_parse_action(
        lambda s, l, t: Commutator(t[0], t[1], loc=l)
    )
    atom = number | name | paren | commutator
    power = (atom + Optional(Suppress("^") + integer)).set_parse_action(_power)
    term = (power + ZeroOrMore(Optional(Suppress("*")) + power)).set_parse_action(_mul)
    sign = one_of("+ -")
    expr <<= (Optional(sign) + term + ZeroOrMore(sign + term)).set_parse_action(_add)

    ring_decl = (
        Keyword("ring") - ident("name") + EQ + Keyword("Q").suppress()
        + LBRACK + Group(delimited_list(ident))("variables") + RBRACK
        + Optional(Suppress("/") + LPAR + Group(expr)("modulus") + RPAR)
        + Optional(Keyword("order").suppress() + one_of(" ".join(ORDERS))("order"))
        + SEMI
    ).set_parse_action(lambda s, l, t: RingDecl(
        t["name"], tuple(t["variables"]), t["modulus"][0] if "modulus" in t else None, t.get("order"), loc=l,
    ))
    der_decl = (Keyword("der") - ident("name") + EQ + Group(expr)("expr") + SEMI).set_parse_action(
        lambda s, l, t: DerDecl(t["name"], t["expr"][0], loc=l)
    )
    bracket_decl = (
        Keyword("bracket") - LBRACK + ident("left") + COMMA + ident("right") + RBRACK
        + EQ + Group(expr)("expr") + SEMI
    ).set_parse_action(lambda s, l, t: BracketDecl(t["left"], t["right"], t["expr"][0], loc=l))
    syz_decl = (Keyword("syz") - LPAR + Group(delimited_list(expr))("entries") + RPAR + SEMI).set_parse_action(
        lambda s, l, t: SyzDecl(tuple(t["entries"]), loc=l)
    )
    el_decl = (Keyword("el") - ident("name") + EQ + Group(expr)("expr") + SEMI).set_parse_action(
        lambda s, l, t: ElDecl(t["name"], t["expr"][0], loc=l)
    )
    command_name = MatchFirst([Keyword(c) for c in COMMANDS])
    argument = (Optional(sign) + power).set_parse_action(_signed)
    command = (command_name("name") - Group(ZeroOrMore(argument))("args") + SEMI).set_parse_action(
        lambda s, l, t: Command(t["name"], tuple(t["args"]), loc=l)
    )

    statement = ring_decl | der_decl | bracket_decl | syz_decl | el_decl | command
    session = ZeroOrMore(statement)
    session.ignore(python_style_comment)
    expr.ignore(python_style_comment)
    return session, expr


def _raise_parse_error(e):
    raise ParseError(f"Syntax error: {e.msg}", line=e.lineno, column=e.col, expected=e.msg) from None


def parse(source):
    """Parse session text into a SessionFile; syntax errors carry line, column and the expected token."""
    session, _ = make_grammar()
    try:
        statements = session.parse_string(source, parse_all=True)
    except ParseBaseException as e:
        _raise_parse_error(e)
    except RecursionError:
        raise ParseError("Expression nested too deeply")
    result = SessionFile(tuple(statements), source)
    logger.debug(f"parsed session with {len(result.statements)} statements")
    return result


def parse_expression(text):
    _, expr = make_grammar()
    try:
        return expr.parse_string(text, parse_all=True)[0]
    except ParseBaseException as e:
        _raise_parse_error(e)
    except RecursionError:
        raise ParseError("Expression nested too deeply")


# ----------------------------
# Rendering
# ----------------------------
def render_number(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_expr(node):
    if isinstance(node, Num):
        return render_number(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Pow):
        return f"{render_expr(node.base)}^{node.exponent}"
    if isinstance(node, Mul):
        return "*".join(render_expr(f) for f in node.factors)
    if isinstance(node, Paren):
        return f"({render_expr(node.inner)})"
    if isinstance(node, Commutator):
        return f"[{render_expr(node.left)}, {render_expr(node.right)}]"
    if isinstance(node, Add):
        out = ""
        for k, (sign, term) in enumerate(node.terms):
            text = render_expr(term)
            if k == 0:
                out = f"-{text}" if sign == "-" else text
            else:
                out += f" {sign} {text}"
        return out
    raise UserError(f"Cannot render {node!r}")


def render_statement(stmt):
    if isinstance(stmt, RingDecl):
        text = f"ring {stmt.name} = Q[{','.join(stmt.variables)}]"
        if stmt.modulus is not None:
            text += f" / ({render_expr(stmt.modulus)})"
        if stmt.order:
            text += f" order {stmt.order}"
        return text + ";"
    if isinstance(stmt, DerDecl):
        return f"der {stmt.name} = {render_expr(stmt.expr)};"
    if isinstance(stmt, BracketDecl):
        return f"bracket [{stmt.left},{stmt.right}] = {render_expr(stmt.expr)};"
    if isinstance(stmt, SyzDecl):
        return f"syz ({', '.join(render_expr(e) for e in stmt.entries)});"
    if isinstance(stmt, ElDecl):
        return f"el {stmt.name} = {render_expr(stmt.expr)};"
    if isinstance(stmt, Command):
        return " ".join([stmt.name] + [render_expr(a) for a in stmt.args]) + ";"
    raise UserError(f"Cannot render {stmt!r}")


def render(session):
    return "\n".join(render_statement(s) for s in session.statements) + "\n"


# ----------------------------
# Evaluation
# ----------------------------
class Algebra:
    """How names, numbers and operators are interpreted while evaluating an expression."""

    def name(self, ident):
        raise KeyError(ident)

    def number(self, value):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, n):
        result = self.number(Fraction(1))
        for _ in range(n):
            result = self.mul(result, a)
        return result

    def commutator(self, a, b):
        raise UserError("Commutators are not available in this expression")


def evaluate(node, algebra, source=""):
    if isinstance(node, Num):
        return algebra.number(node.value)
    if isinstance(node, Name):
        try:
            return algebra.name(node.name)
        except KeyError:
            line, column = (lineno(node.loc, source), col(node.loc, source)) if source and node.loc is not None else (None, None)
            where = f" (line {line}, column {column})" if line is not None else ""
            raise UnknownIdentifier(f"Unknown identifier '{node.name}'{where}") from None
    if isinstance(node, Paren):
        return evaluate(node.inner, algebra, source)
    if isinstance(node, Pow):
        return algebra.pow(evaluate(node.base, algebra, source), node.exponent)
    if isinstance(node, Mul):
        result = evaluate(node.factors[0], algebra, source)
        for factor in node.factors[1:]:
            result = algebra.mul(result, evaluate(factor, algebra, source))
        return result
    if isinstance(node, Commutator):
        return algebra.commutator(evaluate(node.left, algebra, source), evaluate(node.right, algebra, source))
    if isinstance(node, Add):
        result = None
        for sign, term in node.terms:
            value = evaluate(term, algebra, source)
            if sign == "-":
                value = algebra.neg(value)
            result = value if result is None else algebra.add(result, value)
        return result
    raise UserError(f"Cannot evaluate {node!r}")


class PolyAlgebra(Algebra):
    """Polynomials over a ring context: names are its variables."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.gens = dict(zip(ctx.variables, ctx.gens))

    def name(self, ident):
        return self.gens[ident]

    def number(self, value):
        return self.ctx.coerce(value)


def parse_poly(text, ctx):
    """Polynomial text such as `3/2*x^2*y - z + 1` as an element of ctx's ring (not reduced)."""
    return evaluate(parse_expression(text), PolyAlgebra(ctx), text)
