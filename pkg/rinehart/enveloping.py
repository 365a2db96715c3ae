"""
The universal enveloping algebra U(R, L) of a presented Lie-Rinehart algebra.

Elements are sums f * D_{i_1} ... D_{i_k} with ring coefficients on the left.
Straightening uses two rules: D_i * g = g * D_i + D_i(g) moves coefficients
left, and D_j * D_i = D_i * D_j + sum_k gamma_ji^k D_k (j > i) sorts words.
Over free presentations the sorted words are a basis; otherwise the normal
form is a canonical representative of a spanning set and semantic equality
falls back to the differential-operator action on R.
"""
import logging
from dataclasses import dataclass, field
from itertools import groupby

from sympy.polys.domains import QQ
from sympy.utilities.iterables import multiset_permutations

from .derivation import apply, require_verified, restrict_to_quotient
from .exceptions import (
    DegreeExceeded,
    GeneratorMismatch,
    LengthMismatch,
    NotLogarithmic,
    PresentationMismatch,
    RewriteLimitExceeded,
    TruncationExceeded,
)
from .polyring import format_poly, random_poly, reduce, standard_monomials, total_degree
from .utils import setting

logger = logging.getLogger(__name__)


def _descent(word):
    for p in range(len(word) - 1):
        if word[p] > word[p + 1]:
            return p
    return None


def _is_sorted(word):
    return _descent(word) is None


# ----------------------------
# Elements
# ----------------------------
@dataclass(frozen=True)
class UElement:
    """Map from nondecreasing words to nonzero reduced coefficients."""

    pres: object
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        ring = self.pres.ring
        cleaned = {}
        for word, coeff in self.terms.items():
            coeff = reduce(ring.coerce(coeff), ring)
            if coeff:
                cleaned[tuple(word)] = coeff
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, pres):
        return cls(pres, {})

    @classmethod
    def one(cls, pres):
        return cls(pres, {(): pres.ring.one})

    @classmethod
    def ring_element(cls, pres, f):
        return cls(pres, {(): f})

    @classmethod
    def generator(cls, pres, index):
        if not 0 <= index < pres.size:
            raise LengthMismatch(f"Generator index {index} outside 0..{pres.size - 1}")
        return cls(pres, {(index,): pres.ring.one})

    def _same(self, other):
        if self.pres != other.pres:
            raise PresentationMismatch(f"Elements of {self.pres} and {other.pres} cannot be combined")

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        self._same(other)
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            terms[word] = terms.get(word, self.pres.ring.zero) + coeff
        return UElement(self.pres, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return UElement(self.pres, {w: -c for w, c in self.terms.items()})

    def scale(self, f):
        """Left multiplication by a ring element (or a rational)."""
        f = self.pres.ring.coerce(f)
        return UElement(self.pres, {w: f * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, UElement):
            return multiply(self, other)
        return multiply(self, UElement.ring_element(self.pres, other))

    def __rmul__(self, other):
        return self.scale(other)

    def __str__(self):
        return format_element(self)


@dataclass(frozen=True)
class STensor:
    """Symmetric tensors: sorted index tuples (multisets) to reduced coefficients."""

    pres: object
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        ring = self.pres.ring
        cleaned = {}
        for multiset, coeff in self.terms.items():
            key = tuple(sorted(multiset))
            total = cleaned.get(key, ring.zero) + ring.coerce(coeff)
            cleaned[key] = reduce(total, ring)
        object.__setattr__(self, "terms", {k: v for k, v in cleaned.items() if v})

    @property
    def degrees(self):
        return sorted({len(k) for k in self.terms})

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for key in sorted(self.terms, key=lambda k: (-len(k), k)):
            body = "{" + ",".join(self.pres.names[i] for i in key) + "}"
            pieces.append(_term_text(self.terms[key], body if key else ""))
        return _join(pieces)


# ----------------------------
# Rewriting
# ----------------------------
def move_left(pres, word, g):
    """word * g as a list of (coefficient, word) pairs with coefficients on the left."""
    if not g:
        return []
    if not word:
        return [(g, ())]
    head, last = word[:-1], word[-1]
    out = [(c, w + (last,)) for c, w in move_left(pres, head, g)]
    dg = apply(pres.generators[last], g)
    if dg:
        out.extend(move_left(pres, head, dg))
    return out


def normal_form(raw, pres, max_steps=None):
    """
    Straighten a list of (coefficient, word) pairs, words in any order, into
    sorted-word normal form.
    """
    require_verified(pres)
    ring = pres.ring
    limit = setting("RINEHART_MAX_REWRITE_STEPS", max_steps)
    pending = {}

    def push(word, coeff):
        coeff = reduce(ring.coerce(coeff), ring)
        if not coeff:
            return
        total = pending.get(word, ring.zero) + coeff
        if total:
            pending[word] = total
        else:
            pending.pop(word, None)

    for coeff, word in raw:
        word = tuple(word)
        for index in word:
            if not 0 <= index < pres.size:
                raise LengthMismatch(f"Generator index {index} outside 0..{pres.size - 1}")
        push(word, coeff)

    steps = 0
    while True:
        unsorted = [w for w in pending if not _is_sorted(w)]
        if not unsorted:
            break
        word = max(unsorted, key=lambda w: (len(w), w))
        coeff = pending.pop(word)
        p = _descent(word)
        j, i = word[p], word[p + 1]
        head, tail = word[:p], word[p + 2:]
        push(head + (i, j) + tail, coeff)
        for k, gamma in enumerate(pres.gamma(j, i)):
            if not gamma:
                continue
            for c, w in move_left(pres, head, gamma):
                push(w + (k,) + tail, coeff * c)
        steps += 1
        if steps > limit:
            raise RewriteLimitExceeded(f"Straightening exceeded {limit} steps in {pres}")

    if steps:
        logger.debug(f"normal form in {pres} after {steps} rewrite steps, {len(pending)} terms")
    return UElement(pres, pending)


def multiply(u, v):
    u._same(v)
    raw = []
    for w1, f in u.terms.items():
        for w2, g in v.terms.items():
            for c, w in move_left(u.pres, w1, g):
                raw.append((f * c, w + w2))
    return normal_form(raw, u.pres)


def commutator(u, v):
    return multiply(u, v) - multiply(v, u)


def power(u, n):
    result = UElement.one(u.pres)
    for _ in range(n):
        result = multiply(result, u)
    return result


# ----------------------------
# Filtration, symbols, symmetrization
# ----------------------------
def filtration_degree(u):
    return max((len(w) for w in u.terms), default=0)


def symbol(u, n):
    """Image of u in the degree-n graded piece: words of length exactly n as multisets."""
    if filtration_degree(u) > n:
        raise DegreeExceeded(f"Element of filtration degree {filtration_degree(u)} has no symbol in degree {n}")
    return STensor(u.pres, {w: c for w, c in u.terms.items() if len(w) == n})


def symmetrize(t):
    """(1/k!) f sum over all orderings, computed over distinct arrangements of each multiset."""
    raw = []
    for multiset, f in t.terms.items():
        arrangements = [tuple(p) for p in multiset_permutations(list(multiset))] if multiset else [()]
        weight = QQ(1, len(arrangements))
        raw.extend((f * weight, word) for word in arrangements)
    return normal_form(raw, t.pres)


def counit(u):
    return u.terms.get((), u.pres.ring.zero)


def split_degree_one(u):
    """(ring part, generator coefficients) of an element of filtration degree <= 1."""
    if filtration_degree(u) > 1:
        raise DegreeExceeded(f"Element of filtration degree {filtration_degree(u)} does not split in degree one")
    ring = u.pres.ring
    return counit(u), tuple(u.terms.get((i,), ring.zero) for i in range(u.pres.size))


# ----------------------------
# Differential-operator action on R
# ----------------------------
def act(u, p):
    """u acting on p: each word composes derivations right to left after which the coefficient multiplies."""
    ring = u.pres.ring
    p = reduce(ring.coerce(p), ring)
    total = ring.zero
    for word, f in u.terms.items():
        q = p
        for index in reversed(word):
            q = apply(u.pres.generators[index], q)
            if not q:
                break
        if q:
            total += f * q
    return reduce(total, ring)


def evaluate_operator(u, p, truncation=None):
    """The action of u on p, refusing inputs or results above the truncation degree."""
    limit = setting("RINEHART_TRUNCATION", truncation)
    p = u.pres.ring.coerce(p)
    if total_degree(p) > limit:
        raise TruncationExceeded(f"Input of degree {total_degree(p)} exceeds truncation {limit}")
    result = act(u, p)
    if total_degree(result) > limit:
        raise TruncationExceeded(f"Result of degree {total_degree(result)} exceeds truncation {limit}")
    return result


@dataclass
class OperatorComparison:
    equal: bool
    truncation: int
    witness: str = None

    @property
    def status(self):
        if self.equal:
            return f"equal up to degree {self.truncation}"
        return "different"


def operator_equal(u, v, truncation=None):
    """Compare u and v through their action on the standard monomials of R up to the truncation."""
    u._same(v)
    limit = setting("RINEHART_TRUNCATION", truncation)
    ring = u.pres.ring
    difference = u - v
    for exponents in standard_monomials(ring, limit):
        image = act(difference, ring.monomial(exponents))
        if image:
            witness = format_poly(ring.monomial(exponents))
            return OperatorComparison(False, limit, f"differ on {witness}: {format_poly(image)}")
    return OperatorComparison(True, limit)


def elements_equal(u, v, truncation=None):
    """
    Exact over free presentations; otherwise equal words decide and
    distinct words fall back to the operator comparison.
    """
    if u == v:
        return OperatorComparison(True, None)
    if u.pres.is_free:
        return OperatorComparison(False, None, "normal forms differ")
    return operator_equal(u, v, truncation)


# ----------------------------
# Maps between enveloping algebras
# ----------------------------
def induced_morphism(u, target, images):
    """Substitute generator images word by word and renormalize in the target presentation."""
    if len(images) != u.pres.size:
        raise LengthMismatch(f"{len(images)} generator images for {u.pres.size} generators")
    total = UElement.zero(target)
    for word, f in u.terms.items():
        piece = UElement.ring_element(target, target.ring.coerce(f))
        for index in word:
            piece = multiply(piece, images[index])
        total = total + piece
    return total


def push_to_quotient(u, target):
    """The canonical map to U over the quotient, defined on generators by restriction."""
    source = u.pres
    if source.size != target.size:
        raise GeneratorMismatch(f"{source} has {source.size} generators, {target} has {target.size}")
    for index, (D, E) in enumerate(zip(source.generators, target.generators)):
        try:
            image = restrict_to_quotient(D, source.ring, target.ring)
        except NotLogarithmic as e:
            raise GeneratorMismatch(f"Generator {source.names[index]} does not descend: {e}") from e
        if image != E:
            raise GeneratorMismatch(f"Generator {source.names[index]} restricts to {image}, target has {E}")
    return induced_morphism(u, target, [UElement.generator(target, i) for i in range(target.size)])


# ----------------------------
# Text rendering
# ----------------------------
def format_word(pres, word):
    parts = []
    for index, run in groupby(word):
        count = len(list(run))
        name = pres.names[index]
        parts.append(name if count == 1 else f"{name}^{count}")
    return "*".join(parts)


def _term_text(coeff, body):
    if not body:
        return format_poly(coeff)
    if len(coeff) == 1:
        text = format_poly(coeff)
        if text == "1":
            return body
        if text == "-1":
            return f"-{body}"
        return f"{text}*{body}"
    return f"({format_poly(coeff)})*{body}"


def _join(pieces):
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


def format_element(u):
    if not u.terms:
        return "0"
    ordered = sorted(u.terms, key=lambda w: (-len(w), w))
    return _join([_term_text(u.terms[w], format_word(u.pres, w)) for w in ordered])


# ----------------------------
# Sampling
# ----------------------------
def random_element(pres, rng, max_length=3, coeff_degree=2, terms=3):
    """Normal form of a few random coefficient-times-word terms, words in arbitrary order."""
    raw = []
    for _ in range(terms):
        length = rng.randint(0, max_length)
        word = tuple(rng.randrange(pres.size) for _ in range(length))
        raw.append((random_poly(pres.ring, rng, coeff_degree, terms=2), word))
    return normal_form(raw, pres)


def random_tensor(pres, rng, degree, coeff_degree=3, terms=3):
    """A random symmetric tensor homogeneous of the given degree."""
    entries = {}
    for _ in range(terms):
        key = tuple(sorted(rng.randrange(pres.size) for _ in range(degree)))
        entries[key] = entries.get(key, pres.ring.zero) + random_poly(pres.ring, rng, coeff_degree, terms=2)
    return STensor(pres, entries)
