import logging
import random
from fractions import Fraction

from django.conf import settings
from sympy import Matrix, Rational, eye, zeros
from sympy.polys.domains import QQ

from . import __version__

logger = logging.getLogger(__name__)

DEFAULTS = {
    "RINEHART_TRUNCATION": 12,
    "RINEHART_MONOMIAL_ORDER": "grevlex",
    "RINEHART_MAX_REWRITE_STEPS": 1_000_000,
    "RINEHART_ORACLE_PAIR_DEGREE": 3,
    "RINEHART_SUITE_SAMPLES": 200,
    "RINEHART_SEED": 0,
    "RINEHART_SUITE_JOBS": 1,
    "RINEHART_VERSION": __version__,
}


def setting(name, override=None):
    """
    Resolve a tunable: an explicit argument wins over the Django setting,
    which wins over the built-in default.
    """
    if override is not None:
        return override
    return getattr(settings, name, DEFAULTS[name])


# ----------------------------
# Exact rationals
# ----------------------------
def to_rational(value):
    """Coerce ints, Fractions, sympy Rationals and "a/b" strings into QQ."""
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.p), int(value.q))
    return QQ.convert(value)


def rational_str(value):
    value = to_rational(value)
    return f"{int(value.numerator)}/{int(value.denominator)}"


# ----------------------------
# Exact linear algebra over QQ
# ----------------------------
def to_matrix(rows, ncols):
    """Build a sympy Matrix of Rationals from QQ rows; an empty row list gives a 0 x ncols matrix."""
    if not rows:
        return Matrix.zeros(0, ncols)
    return Matrix([[QQ.to_sympy(c) for c in row] for row in rows])


def kernel(matrix):
    """
    Kernel of a sympy Matrix as (basis columns, free column indices), read off
    Matrix.rref() and Matrix.nullspace(): each basis column has a 1 in its own
    free column and 0 in every other free column.
    """
    ncols = matrix.cols
    if ncols == 0:
        return zeros(0, 0), []
    if matrix.rows == 0:
        return eye(ncols), list(range(ncols))
    _, pivots = matrix.rref()
    free = [j for j in range(ncols) if j not in pivots]
    vectors = matrix.nullspace()
    basis = Matrix.hstack(*vectors) if vectors else zeros(ncols, 0)
    logger.debug(f"kernel of {matrix.rows}x{ncols} system has dimension {len(free)}")
    return basis, free


def nullspace(rows, ncols):
    """Kernel basis of the matrix with the given QQ rows, as QQ vectors in free-column order."""
    basis, _ = kernel(to_matrix(rows, ncols))
    return [[QQ.from_sympy(basis[i, k]) for i in range(ncols)] for k in range(basis.cols)]


def rank(rows, ncols):
    if not rows or not ncols:
        return 0
    return to_matrix(rows, ncols).rank()


# ----------------------------
# Deterministic sampling
# ----------------------------
def make_rng(seed=None):
    return random.Random(setting("RINEHART_SEED", seed))


def random_rational(rng, spread=5):
    numerator = rng.randint(-spread, spread)
    denominator = rng.choice([1, 1, 1, 2, 3])
    return QQ(numerator, denominator)
