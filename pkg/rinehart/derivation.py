"""
Derivations of polynomial and principal quotient rings, Lie-Rinehart
presentations on top of them, and the checks that make a presentation
trustworthy for PBW rewriting.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from sympy.polys.domains import QQ

from .exceptions import (
    ContextMismatch,
    IndexOutOfRange,
    LengthMismatch,
    ModulusRequired,
    NotLogarithmic,
    UnverifiedPresentation,
    UnverifiedSyzygy,
    UserError,
)
from .polyring import (
    RingCtx,
    evaluate,
    format_poly,
    ideal_member,
    monomials_up_to,
    partial,
    reduce,
)
from .reports import FAIL, PASS, UNDECIDED, Check, Report, check
from .utils import nullspace, rank

logger = logging.getLogger(__name__)


def _same_variables(a, b):
    if a.variables != b.variables:
        raise ContextMismatch(f"Contexts over {list(a.variables)} and {list(b.variables)} do not match")


# ----------------------------
# Derivation
# ----------------------------
@dataclass(frozen=True)
class Derivation:
    """D = sum_i coeffs[i] * d/dx_i over ctx; coefficients are reduced when ctx has a modulus."""

    ctx: RingCtx
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(reduce(self.ctx.coerce(c), self.ctx) for c in self.coeffs)
        if len(coeffs) != self.ctx.nvars:
            raise LengthMismatch(f"A derivation over {self.ctx.nvars} variables needs {self.ctx.nvars} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [ctx.zero] * ctx.nvars)

    @classmethod
    def partial_field(cls, ctx, index):
        if not 0 <= index < ctx.nvars:
            raise IndexOutOfRange(f"Variable index {index} outside 0..{ctx.nvars - 1}")
        return cls(ctx, [ctx.one if i == index else ctx.zero for i in range(ctx.nvars)])

    def __call__(self, p):
        return apply(self, p)

    def __add__(self, other):
        _same_variables(self.ctx, other.ctx)
        return Derivation(self.ctx, [a + self.ctx.coerce(b) for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        _same_variables(self.ctx, other.ctx)
        return Derivation(self.ctx, [a - self.ctx.coerce(b) for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Derivation(self.ctx, [-a for a in self.coeffs])

    def scale(self, r):
        r = self.ctx.coerce(r)
        return Derivation(self.ctx, [r * a for a in self.coeffs])

    def is_zero(self):
        return not any(self.coeffs)

    def in_context(self, ctx):
        """The same coefficients read (and reduced) in another context over the same variables."""
        _same_variables(self.ctx, ctx)
        return Derivation(ctx, self.coeffs)

    def __str__(self):
        return format_derivation(self)


def format_derivation(D):
    pieces = []
    for name, c in zip(D.ctx.variables, D.coeffs):
        if not c:
            continue
        text = format_poly(c)
        if len(c) > 1:
            text = f"({text})"
        if text == "1":
            pieces.append(f"d{name}")
        elif text == "-1":
            pieces.append(f"-d{name}")
        else:
            pieces.append(f"{text}*d{name}")
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


def lin_combination(coeffs, derivations, ctx):
    """sum_i coeffs[i] * derivations[i] as a derivation over ctx."""
    if len(coeffs) != len(derivations):
        raise LengthMismatch(f"{len(coeffs)} coefficients for {len(derivations)} derivations")
    total = Derivation.zero(ctx)
    for c, D in zip(coeffs, derivations):
        total = total + D.in_context(ctx).scale(c)
    return total


# ----------------------------
# Core operations
# ----------------------------
def apply(D, p):
    """sum_i c_i * dp/dx_i, reduced modulo D.ctx's modulus."""
    ctx = D.ctx
    p = ctx.coerce(p)
    total = ctx.zero
    for i, c in enumerate(D.coeffs):
        if c:
            total += c * partial(p, i)
    return reduce(total, ctx)


def bracket(D1, D2):
    _same_variables(D1.ctx, D2.ctx)
    if D1.ctx.modulus != D2.ctx.modulus:
        raise ContextMismatch("Bracket of derivations over different quotient rings")
    coeffs = [apply(D1, c2) - apply(D2, c1) for c1, c2 in zip(D1.coeffs, D2.coeffs)]
    return Derivation(D1.ctx, coeffs)


def is_logarithmic(D, ctx):
    """True iff D(f) lies in <f> for the modulus f of ctx (computed in the ambient ring)."""
    if ctx.modulus is None:
        raise ModulusRequired("Logarithmic membership needs a context with a modulus")
    _same_variables(D.ctx, ctx)
    ambient = D.in_context(ctx.ambient())
    return ideal_member(apply(ambient, ctx.modulus), ctx)


def restrict_to_quotient(D, ambient, quotient):
    """The derivation induced on ambient / <f>, represented by reduced coefficients."""
    _same_variables(ambient, quotient)
    _same_variables(D.ctx, ambient)
    if not is_logarithmic(D, quotient):
        raise NotLogarithmic(f"{format_derivation(D)} does not preserve <{format_poly(quotient.modulus)}>")
    return D.in_context(quotient)


def euler_field(ctx, weights=None):
    """sum_i w_i x_i d/dx_i (all weights 1 by default)."""
    weights = weights or [1] * ctx.nvars
    return Derivation(ctx, [QQ(w) * g for w, g in zip(weights, ctx.gens)])


def hamiltonian_fields(ctx, poisson):
    """
    D_{x_i} = sum_j {x_i, x_j} d/dx_j from a Poisson table given on pairs
    i < j of variable indices; the table is extended antisymmetrically.
    """
    n = ctx.nvars
    table = {}
    for (i, j), value in poisson.items():
        table[(i, j)] = ctx.coerce(value)
        table[(j, i)] = -ctx.coerce(value)
    return [Derivation(ctx, [table.get((i, j), ctx.zero) for j in range(n)]) for i in range(n)]


# ----------------------------
# Spans over QQ
# ----------------------------
def _coordinate_keys(derivations):
    keys = set()
    for D in derivations:
        for i, c in enumerate(D.coeffs):
            keys.update((i, m) for m in c.itermonoms())
    return sorted(keys)


def _as_rows(derivations, keys):
    return [[D.coeffs[i].get(m, QQ(0)) for i, m in keys] for D in derivations]


def span_contains(basis, D):
    """Exact QQ-span membership via rank comparison."""
    keys = _coordinate_keys(list(basis) + [D])
    if not keys:
        return True
    rows = _as_rows(basis, keys)
    return rank(rows, len(keys)) == rank(rows + _as_rows([D], keys), len(keys))


def same_span(first, second):
    return all(span_contains(first, D) for D in second) and all(span_contains(second, D) for D in first)


def linearly_independent(derivations):
    keys = _coordinate_keys(derivations)
    if not derivations:
        return True
    return rank(_as_rows(derivations, keys), len(keys)) == len(derivations)


# ----------------------------
# Logarithmic derivation solver
# ----------------------------
def solve_log_derivations(ctx, degree):
    """
    QQ-basis of the logarithmic derivations whose coefficients have degree
    <= degree, as the nullspace of (c_{i,m}) -> remainder of sum c_{i,m} m df/dx_i.
    Columns run over (monomial, variable) in graded-lex order of the monomial.
    """
    if ctx.modulus is None:
        raise ModulusRequired("Solving for logarithmic derivations needs a modulus")
    if degree < 0:
        raise UserError(f"Coefficient degree bound must be non-negative, got {degree}")

    ambient = ctx.ambient()
    f = ambient.coerce(ctx.modulus)
    gradients = [partial(f, i) for i in range(ctx.nvars)]
    columns = [(m, i) for m in monomials_up_to(ctx.nvars, degree) for i in range(ctx.nvars)]

    images = [reduce(ambient.monomial(m) * gradients[i], ctx) for m, i in columns]
    row_monomials = sorted({mono for image in images for mono in image.itermonoms()})
    rows = [[image.get(mono, QQ(0)) for image in images] for mono in row_monomials]
    logger.debug(f"log-derivation system over {ctx}: {len(rows)} equations, {len(columns)} unknowns")

    basis = []
    for vector in nullspace(rows, len(columns)):
        coeffs = [ambient.zero] * ctx.nvars
        for (m, i), value in zip(columns, vector):
            if value:
                coeffs[i] += value * ambient.monomial(m)
        basis.append(Derivation(ambient, coeffs))
    return basis


def log_derivation_report(ctx, degree, reference=None, reference_name="reference generators"):
    """
    Solver output plus a discrepancy note: a solver field D with D(f) != 0 lies
    outside the span over the ring of reference fields that all annihilate f.
    """
    basis = solve_log_derivations(ctx, degree)
    report = Report(command=f"logder solve {ctx} --deg {degree}", result=basis)
    report.add(check("logarithmic", all(is_logarithmic(D, ctx) for D in basis)))
    report.add(check("independent", linearly_independent(basis)))
    if not reference:
        return report

    ambient = ctx.ambient()
    f = ambient.coerce(ctx.modulus)
    annihilating = all(not apply(R.in_context(ambient), f) for R in reference)
    report.add(check(
        "contains reference",
        all(span_contains(basis, R.in_context(ambient)) for R in reference),
        witness=", ".join(format_derivation(R) for R in reference if not span_contains(basis, R.in_context(ambient))),
    ))
    outside = [D for D in basis if apply(D, f)]
    if outside and annihilating:
        names = "; ".join(format_derivation(D) for D in outside)
        report.notes.append(
            f"discrepancy: {len(outside)} solver field(s) lie outside the ring span of the {reference_name} "
            f"(every ring combination of them annihilates {format_poly(f)}, these do not): {names}"
        )
        logger.info(f"log-derivation discrepancy over {ctx}: {names}")
    elif outside:
        report.notes.append(f"span comparison with the {reference_name} is inconclusive")
    return report


# ----------------------------
# Presentations
# ----------------------------
@dataclass(frozen=True)
class Syzygy:
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    def __len__(self):
        return len(self.coefficients)


@dataclass(frozen=True)
class LRPresentation:
    """
    Generators D_1..D_m over ``ring`` with the structure table
    [D_i, D_j] = sum_k gamma_ij^k D_k, stored as the entries the author supplied.
    """

    ring: RingCtx
    names: tuple
    generators: tuple
    brackets: tuple = ()
    syzygies: tuple = ()
    free: bool = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "generators", tuple(D.in_context(self.ring) for D in self.generators))
        if len(self.names) != len(self.generators):
            raise LengthMismatch(f"{len(self.names)} names for {len(self.generators)} generators")
        if len(set(self.names)) != len(self.names):
            raise UserError(f"Duplicate generator names in {list(self.names)}")
        entries = self.brackets.items() if isinstance(self.brackets, dict) else self.brackets
        m = len(self.generators)
        normalized = []
        for (i, j), coeffs in entries:
            if not (0 <= i < m and 0 <= j < m):
                raise IndexOutOfRange(f"Bracket entry ({i}, {j}) outside {m} generators")
            coeffs = tuple(reduce(self.ring.coerce(c), self.ring) for c in coeffs)
            if len(coeffs) != m:
                raise LengthMismatch(f"Bracket entry ({i}, {j}) needs {m} coefficients, got {len(coeffs)}")
            normalized.append(((i, j), coeffs))
        object.__setattr__(self, "brackets", tuple(normalized))
        object.__setattr__(
            self, "syzygies",
            tuple(s if isinstance(s, Syzygy) else Syzygy(s) for s in self.syzygies),
        )

    @property
    def size(self):
        return len(self.generators)

    @property
    def is_free(self):
        if self.free is not None:
            return self.free
        return not self.syzygies

    @cached_property
    def _table(self):
        return dict(self.brackets)

    def gamma(self, i, j):
        """Structure coefficients of [D_i, D_j]; missing entries follow antisymmetry, then zero."""
        if (i, j) in self._table:
            return self._table[(i, j)]
        if (j, i) in self._table:
            return tuple(-c for c in self._table[(j, i)])
        return tuple(self.ring.zero for _ in range(self.size))

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise IndexOutOfRange(f"Unknown generator '{name}' (have {list(self.names)})")

    def table_derivation(self, i, j):
        return lin_combination(self.gamma(i, j), self.generators, self.ring)

    def __str__(self):
        return self.label or f"LR[{', '.join(self.names)}] over {self.ring}"


def verify_syzygy(s, pres):
    if len(s.coefficients) != pres.size:
        raise LengthMismatch(f"Syzygy has {len(s.coefficients)} coefficients, presentation has {pres.size} generators")
    return lin_combination(s.coefficients, pres.generators, pres.ring).is_zero()


def fiber_rank(pres, syzygies, point):
    """m minus the rank of the syzygy matrix evaluated at the point."""
    if len(point) != pres.ring.nvars:
        raise ContextMismatch(f"Point has {len(point)} coordinates, ring has {pres.ring.nvars} variables")
    rows = []
    for s in syzygies:
        s = s if isinstance(s, Syzygy) else Syzygy(s)
        if not verify_syzygy(s, pres):
            raise UnverifiedSyzygy(f"({', '.join(format_poly(pres.ring.coerce(c)) for c in s.coefficients)}) is not a syzygy")
        rows.append([evaluate(pres.ring.coerce(c), point) for c in s.coefficients])
    return pres.size - rank(rows, pres.size)


# ----------------------------
# Axiom checks
# ----------------------------
def _formal_bracket(pres, i, vector):
    """[D_i, sum_l v_l D_l] in generator coordinates: sum_l (v_l [D_i, D_l] + D_i(v_l) D_l)."""
    out = [pres.ring.zero] * pres.size
    D = pres.generators[i]
    for l, v in enumerate(vector):
        if not v:
            continue
        for k, g in enumerate(pres.gamma(i, l)):
            out[k] += v * g
        out[l] += apply(D, v)
    return [reduce(c, pres.ring) for c in out]


def check_lr_axioms(pres):
    """Antisymmetry, logarithmic generators, table consistency, Jacobi and Leibniz, with witnesses."""
    ring = pres.ring
    report = Report(command=f"lr verify {pres}")
    m = pres.size

    bad = []
    for (i, j), coeffs in pres.brackets:
        if i == j and any(coeffs):
            bad.append(f"[{pres.names[i]},{pres.names[i]}] != 0")
        elif (j, i) in pres._table and any(a + b for a, b in zip(coeffs, pres._table[(j, i)])):
            bad.append(f"[{pres.names[i]},{pres.names[j]}] != -[{pres.names[j]},{pres.names[i]}]")
    report.add(check("antisymmetry", not bad, "; ".join(bad)))

    if ring.modulus is not None:
        bad = [pres.names[k] for k, D in enumerate(pres.generators) if not is_logarithmic(D, ring)]
        report.add(check("logarithmic generators", not bad, ", ".join(bad)))

    bad = []
    for i in range(m):
        for j in range(i + 1, m):
            actual = bracket(pres.generators[i], pres.generators[j])
            expected = pres.table_derivation(i, j)
            if actual != expected:
                bad.append(
                    f"[{pres.names[i]},{pres.names[j]}]: commutator {format_derivation(actual)}, "
                    f"table {format_derivation(expected)}"
                )
    report.add(check("bracket consistency", not bad, "; ".join(bad)))

    bad = []
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                total = [ring.zero] * m
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for l, value in enumerate(_formal_bracket(pres, a, pres.gamma(b, c))):
                        total[l] += value
                image = lin_combination(total, pres.generators, ring)
                if not image.is_zero() or (pres.is_free and any(reduce(t, ring) for t in total)):
                    bad.append(f"({pres.names[i]},{pres.names[j]},{pres.names[k]})")
    report.add(check("jacobi", not bad, "cyclic sum nonzero for " + ", ".join(bad)))

    bad = []
    samples = [reduce(ring.monomial(e), ring) for e in monomials_up_to(ring.nvars, 3)]
    for i, Di in enumerate(pres.generators):
        for j, Dj in enumerate(pres.generators):
            for r in samples:
                left = bracket(Di, Dj.scale(r))
                right = pres.table_derivation(i, j).scale(r) + Dj.scale(apply(Di, r))
                if left != right:
                    bad.append(f"[{pres.names[i]}, ({format_poly(r)})*{pres.names[j]}]")
    report.add(check("leibniz", not bad, "; ".join(bad[:5])))

    if pres.syzygies:
        bad = [str(k) for k, s in enumerate(pres.syzygies) if not verify_syzygy(s, pres)]
        report.add(check("syzygies", not bad, "unverified syzygy index " + ", ".join(bad)))
    logger.debug(f"axiom check for {pres}: {report.status}")
    return report


@lru_cache(maxsize=64)
def _verified(pres):
    return check_lr_axioms(pres).status == PASS


def require_verified(pres):
    if not _verified(pres):
        failed = [c.name for c in check_lr_axioms(pres).failed_checks]
        raise UnverifiedPresentation(f"Presentation {pres} fails the Lie-Rinehart axioms: {', '.join(failed)}")
    return pres


# ----------------------------
# Desk-scale presentations
# ----------------------------
CONE_POISSON = {(0, 1): "2*y", (0, 2): "-2*z", (1, 2): "x"}


def weyl_a1():
    """A_1: the single generator D = d/dx over Q[x]."""
    ctx = RingCtx(("x",))
    return LRPresentation(ctx, ("D",), (Derivation.partial_field(ctx, 0),), label="weyl-a1")


def normal_crossing_ambient():
    """The free log algebroid of xy = 0 over Q[x,y]: a = x dx, b = y dy, [a,b] = 0."""
    ctx = RingCtx(("x", "y"))
    x, y = ctx.gens
    a = Derivation(ctx, (x, 0))
    b = Derivation(ctx, (0, y))
    return LRPresentation(ctx, ("a", "b"), (a, b), {(0, 1): (0, 0)}, label="normal-crossing")


def normal_crossing_quotient():
    """Der of Q[x,y]/(xy): a = x dx, b = y dy with syzygies y*a = 0 and x*b = 0."""
    ctx = RingCtx(("x", "y"), "x*y")
    x, y = ctx.gens
    a = Derivation(ctx, (x, 0))
    b = Derivation(ctx, (0, y))
    return LRPresentation(
        ctx, ("a", "b"), (a, b), {(0, 1): (0, 0)},
        syzygies=((y, 0), (0, x)), label="normal-crossing-quotient",
    )


def nilpotent_cone():
    """Hamiltonian fields of the Poisson brackets {x,y}=2y, {x,z}=-2z, {y,z}=x over Q[x,y,z]."""
    ctx = RingCtx(("x", "y", "z"))
    x, y, z = ctx.gens
    poisson = {pair: ctx.parse(text) for pair, text in CONE_POISSON.items()}
    fields = hamiltonian_fields(ctx, poisson)
    table = {
        (0, 1): (0, 2, 0),
        (0, 2): (0, 0, -2),
        (1, 2): (1, 0, 0),
    }
    return LRPresentation(
        ctx, ("Dx", "Dy", "Dz"), fields, table,
        syzygies=((x, 2 * z, 2 * y),), label="nilpotent-cone",
    )


def nilpotent_cone_quotient():
    """The cone presentation restricted to Q[x,y,z]/(x^2 + 4yz)."""
    cover = nilpotent_cone()
    quotient = cover.ring.quotient("x^2 + 4*y*z")
    generators = [restrict_to_quotient(D, cover.ring, quotient) for D in cover.generators]
    return LRPresentation(
        quotient, cover.names, generators, cover.brackets,
        syzygies=cover.syzygies, label="nilpotent-cone-quotient",
    )


PRESENTATIONS = {
    "weyl-a1": weyl_a1,
    "normal-crossing": normal_crossing_ambient,
    "normal-crossing-quotient": normal_crossing_quotient,
    "nilpotent-cone": nilpotent_cone,
    "nilpotent-cone-quotient": nilpotent_cone_quotient,
}


def builtin_presentation(name):
    try:
        return PRESENTATIONS[name]()
    except KeyError:
        raise UserError(f"Unknown built-in presentation '{name}' (have {', '.join(PRESENTATIONS)})")
