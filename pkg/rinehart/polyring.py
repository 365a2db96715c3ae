"""
Exact multivariate polynomials over QQ and canonical normal forms in
principal quotient rings K[x_1, ..., x_n] / <f>.

Polynomials are sympy ``PolyElement`` values of a ``PolyRing`` over ``QQ``;
a ``RingCtx`` fixes the variables, the monomial order and the optional
modulus. A single polynomial is a Groebner basis of the ideal it generates,
so the remainder of multivariate division by the modulus is canonical.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement

from sympy.polys.domains import QQ
from sympy.polys.monomials import monomial_divides
from sympy.polys.orderings import MonomialOrder as SympyMonomialOrder
from sympy.polys.orderings import grevlex, grlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from .exceptions import ContextMismatch, IndexOutOfRange, ModulusRequired, UserError
from .utils import random_rational, rational_str, setting, to_rational

logger = logging.getLogger(__name__)

Poly = PolyElement
Monomial = tuple

ORDER_KINDS = {"grevlex": grevlex, "grlex": grlex, "lex": lex}


class PriorityOrder(SympyMonomialOrder):
    """A sympy order applied after permuting exponents into priority order."""

    is_global = True

    def __init__(self, base, priority):
        self.base = base
        self.priority = tuple(priority)
        self.alias = f"{base.alias}{list(self.priority)}"

    def __call__(self, monomial):
        return self.base(tuple(monomial[i] for i in self.priority))

    def __repr__(self):
        return f"PriorityOrder({self.base.alias}, {self.priority})"

    def __eq__(self, other):
        return (
            isinstance(other, PriorityOrder)
            and self.base == other.base
            and self.priority == other.priority
        )

    def __hash__(self):
        return hash((self.__class__, self.base, self.priority))


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    priority: tuple = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise UserError(f"Unknown monomial order '{self.kind}' (expected grevlex, grlex or lex)")

    def sympy_order(self, nvars):
        base = ORDER_KINDS[self.kind]
        if self.priority is None or tuple(self.priority) == tuple(range(nvars)):
            return base
        if sorted(self.priority) != list(range(nvars)):
            raise UserError(f"Variable priority {self.priority} is not a permutation of {nvars} variables")
        return PriorityOrder(base, self.priority)

    @classmethod
    def default(cls):
        return cls(setting("RINEHART_MONOMIAL_ORDER"))


@lru_cache(maxsize=None)
def _poly_ring(variables, order):
    return PolyRing(list(variables), QQ, order.sympy_order(len(variables)))


@dataclass(frozen=True)
class RingCtx:
    """
    The base ring R = QQ[variables] / <modulus> with a chosen monomial order.

    ``modulus`` may be given as a polynomial of any ring over the same
    variables, or as text in the polynomial syntax; it is stored in this
    context's own ring.
    """

    variables: tuple
    modulus: object = None
    order: MonomialOrder = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise UserError(f"Duplicate variable names in {list(self.variables)}")
        if self.order is None:
            object.__setattr__(self, "order", MonomialOrder.default())
        if self.modulus is not None:
            modulus = self.modulus
            if isinstance(modulus, str):
                modulus = self.parse(modulus)
            modulus = self.coerce(modulus)
            if not modulus or modulus.is_ground:
                raise UserError("The modulus must be a nonzero, nonconstant polynomial")
            object.__setattr__(self, "modulus", modulus)

    @cached_property
    def ring(self):
        return _poly_ring(self.variables, self.order)

    @property
    def nvars(self):
        return len(self.variables)

    @property
    def gens(self):
        return self.ring.gens

    @property
    def zero(self):
        return self.ring.zero

    @property
    def one(self):
        return self.ring.one

    def ambient(self):
        """The same variables and order without a modulus."""
        if self.modulus is None:
            return self
        return RingCtx(self.variables, None, self.order)

    def quotient(self, modulus):
        return RingCtx(self.variables, modulus, self.order)

    def with_order(self, order):
        modulus = None if self.modulus is None else dict(self.modulus)
        ctx = RingCtx(self.variables, None, order)
        if modulus is None:
            return ctx
        return RingCtx(self.variables, ctx.ring.from_dict(modulus), order)

    def coerce(self, p):
        """Bring a polynomial, a rational or an int into this context's ring."""
        if isinstance(p, PolyElement):
            if p.ring == self.ring:
                return p
            if tuple(str(s) for s in p.ring.symbols) != self.variables:
                raise ContextMismatch(
                    f"Polynomial over {[str(s) for s in p.ring.symbols]} used in a context over {list(self.variables)}"
                )
            return p.set_ring(self.ring)
        return self.ring.ground_new(to_rational(p))

    def poly(self, terms):
        """Build a polynomial from a {exponent tuple: coefficient} mapping."""
        return self.ring.from_dict({tuple(m): to_rational(c) for m, c in terms.items()})

    def monomial(self, exponents):
        return self.ring.from_dict({tuple(exponents): QQ(1)})

    def parse(self, text):
        from .grammar import parse_poly

        return parse_poly(text, self)

    def __str__(self):
        base = f"Q[{','.join(self.variables)}]"
        if self.modulus is not None:
            base += f"/({format_poly(self.modulus)})"
        return base


# ----------------------------
# Core operations
# ----------------------------
def reduce(p, ctx):
    """Remainder of multivariate division of p by the modulus under ctx.order."""
    p = _checked(p, ctx)
    if ctx.modulus is None:
        return p
    return p.rem(ctx.modulus)


def division(p, ctx):
    """Return (quotient, remainder) with p = quotient * modulus + remainder."""
    p = _checked(p, ctx)
    if ctx.modulus is None:
        raise ModulusRequired("Division needs a context with a modulus")
    quotient, remainder = p.div(ctx.modulus)
    return quotient, remainder


def ideal_member(p, ctx):
    if ctx.modulus is None:
        raise ModulusRequired("Ideal membership needs a context with a modulus")
    return not reduce(p, ctx)


def partial(p, var_index):
    """Formal partial derivative with respect to the variable at var_index."""
    if not 0 <= var_index < p.ring.ngens:
        raise IndexOutOfRange(f"Variable index {var_index} outside 0..{p.ring.ngens - 1}")
    return p.diff(p.ring.gens[var_index])


def total_degree(p):
    """Total degree; -1 for the zero polynomial."""
    return max((sum(m) for m in p.itermonoms()), default=-1)


def _checked(p, ctx):
    if isinstance(p, PolyElement) and p.ring.ngens != ctx.nvars:
        raise ContextMismatch(f"Polynomial has {p.ring.ngens} variables, context has {ctx.nvars}")
    return ctx.coerce(p)


# ----------------------------
# Monomial bases
# ----------------------------
def monomials_up_to(nvars, degree):
    """All exponent tuples of total degree <= degree, graded then x-before-y."""
    result = []
    for d in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), d):
            exponents = [0] * nvars
            for i in combo:
                exponents[i] += 1
            block.append(tuple(exponents))
        block.sort(key=lambda m: tuple(-e for e in m))
        result.extend(block)
    return result


def standard_monomials(ctx, degree=None):
    """Monomials of degree <= N not divisible by the leading monomial of the modulus."""
    degree = setting("RINEHART_TRUNCATION", degree)
    monomials = monomials_up_to(ctx.nvars, degree)
    if ctx.modulus is None:
        return monomials
    leading = ctx.modulus.LM
    return [m for m in monomials if not monomial_divides(leading, m)]


# ----------------------------
# Text rendering
# ----------------------------
def format_monomial(exponents, variables):
    parts = []
    for name, e in zip(variables, exponents):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_coeff(c):
    c = to_rational(c)
    if c.denominator == 1:
        return str(int(c.numerator))
    return rational_str(c)


def format_poly(p):
    """Render a polynomial in the text syntax, leading term first."""
    if not p:
        return "0"
    variables = [str(s) for s in p.ring.symbols]
    pieces = []
    for monom, coeff in p.terms():
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        body = format_monomial(monom, variables)
        if not body:
            text = format_coeff(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{format_coeff(magnitude)}*{body}"
        if not pieces:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f"- {text}" if negative else f"+ {text}")
    return " ".join(pieces)


def evaluate(p, point):
    """Value of p at a rational point (one coordinate per variable)."""
    if len(point) != p.ring.ngens:
        raise ContextMismatch(f"Point has {len(point)} coordinates, ring has {p.ring.ngens} variables")
    value = QQ(0)
    for monom, coeff in p.iterterms():
        term = coeff
        for coordinate, e in zip(point, monom):
            term *= to_rational(coordinate) ** e
        value += term
    return value


def random_poly(ctx, rng, degree, terms=3):
    """A reduced polynomial with up to ``terms`` random monomials of degree <= degree."""
    basis = standard_monomials(ctx, degree)
    p = ctx.zero
    for _ in range(terms):
        p += ctx.monomial(rng.choice(basis)) * random_rational(rng)
    return reduce(p, ctx)
