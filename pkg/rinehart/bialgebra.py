"""
The bialgebra layer on U(R, L).

Tensors are taken over R with R acting on the left of every factor, so
(f * u) (x) v = u (x) (f * v). A canonical tensor keeps coefficient-free
sorted words in every slot but the last and pushes all ring data into the
last factor, which is an element of U in normal form.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial, prod

from sympy.polys.domains import QQ

from .derivation import Derivation
from .enveloping import (
    UElement,
    act,
    counit,
    filtration_degree,
    format_element,
    format_word,
    multiply,
    operator_equal,
    random_element,
)
from .exceptions import (
    ContextMismatch,
    CounitNonzero,
    DegreeExceeded,
    LengthMismatch,
    NonFreePresentation,
    PresentationMismatch,
)
from .polyring import format_poly, reduce, standard_monomials
from .reports import FAIL, PASS, UNDECIDED, Check, Report, check
from .utils import make_rng, nullspace, random_rational, setting

logger = logging.getLogger(__name__)

YES = "yes"
NO = "no"
UNDECIDED_AT_TRUNCATION = "undecided-at-truncation"


# ----------------------------
# Tensors
# ----------------------------
@dataclass(frozen=True)
class UTensor:
    """Sum of w_1 (x) ... (x) w_{k-1} (x) u over tuples of coefficient-free words."""

    pres: object
    arity: int = 2
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for key, right in self.terms.items():
            key = tuple(tuple(w) for w in key)
            if len(key) != self.arity - 1:
                raise LengthMismatch(f"Tensor key {key} does not fit arity {self.arity}")
            if key in cleaned:
                right = cleaned[key] + right
            cleaned[key] = right
        object.__setattr__(self, "terms", {k: v for k, v in cleaned.items() if v})

    def __bool__(self):
        return bool(self.terms)

    def _same(self, other):
        if self.pres != other.pres or self.arity != other.arity:
            raise PresentationMismatch("Tensors of different presentations or arities cannot be combined")

    def __add__(self, other):
        self._same(other)
        terms = dict(self.terms)
        for key, right in other.terms.items():
            terms[key] = terms[key] + right if key in terms else right
        return UTensor(self.pres, self.arity, terms)

    def __neg__(self):
        return UTensor(self.pres, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def times(self, n):
        return UTensor(self.pres, self.arity, {k: v.scale(n) for k, v in self.terms.items()})

    def __str__(self):
        return format_tensor(self)


def _canonical(factors):
    """Canonical terms of a pure tensor given as a list of UElements."""
    if len(factors) == 1:
        return {(): factors[0]} if factors[0] else {}
    first, second, rest = factors[0], factors[1], factors[2:]
    out = {}
    for word, f in first.terms.items():
        for key, right in _canonical([second.scale(f)] + rest).items():
            full = (word,) + key
            out[full] = out[full] + right if full in out else right
    return out


def tensor_canonicalize(pairs, pres=None):
    """Canonical form of sum of a_1 (x) ... (x) a_k over tuples of UElements."""
    pairs = list(pairs)
    if not pairs and pres is None:
        raise LengthMismatch("An empty tensor needs an explicit presentation")
    pres = pres or pairs[0][0].pres
    arity = len(pairs[0]) if pairs else 2
    total = UTensor(pres, arity)
    for factors in pairs:
        for factor in factors:
            if factor.pres != pres:
                raise PresentationMismatch(f"Tensor factor over {factor.pres}, expected {pres}")
        if len(factors) != arity:
            raise LengthMismatch(f"Mixed tensor arities {arity} and {len(factors)}")
        total = total + UTensor(pres, arity, _canonical(list(factors)))
    return total


def _word(pres, word):
    return UElement(pres, {word: pres.ring.one})


def tensor_multiply(s, t):
    """Slotwise product (a_1 (x) .. ) (b_1 (x) ..) = a_1 b_1 (x) .., canonicalized."""
    s._same(t)
    pres = s.pres
    pairs = []
    for key1, right1 in s.terms.items():
        for key2, right2 in t.terms.items():
            factors = [multiply(_word(pres, a), _word(pres, b)) for a, b in zip(key1, key2)]
            pairs.append(factors + [multiply(right1, right2)])
    return tensor_canonicalize(pairs, pres) if pairs else UTensor(pres, s.arity)


def tensor_swap(t):
    """Exchange the two slots of a binary tensor and canonicalize."""
    if t.arity != 2:
        raise LengthMismatch("Slot swap is defined on binary tensors")
    pairs = [(right, _word(t.pres, key[0])) for key, right in t.terms.items()]
    return tensor_canonicalize(pairs, t.pres) if pairs else t


def counit_left(t):
    """(eps (x) id): only the empty left word survives."""
    return t.terms.get(((),), UElement.zero(t.pres))


def counit_right(t):
    """(id (x) eps): sum of eps(u_w) * w."""
    total = UElement.zero(t.pres)
    for key, right in t.terms.items():
        total = total + _word(t.pres, key[0]).scale(counit(right))
    return total


def format_tensor(t):
    if not t.terms:
        return "0"
    pieces = []
    for key in sorted(t.terms, key=lambda k: tuple((-len(w), w) for w in k)):
        left = " (x) ".join(format_word(t.pres, w) or "1" for w in key)
        pieces.append(f"{left} (x) ({format_element(t.terms[key])})")
    return " + ".join(pieces)


# ----------------------------
# Coproduct
# ----------------------------
def _splits(word):
    """(w_S, w_complement) for every subset S of positions, sorted words stay sorted."""
    positions = range(len(word))
    for size in range(len(word) + 1):
        for chosen in combinations(positions, size):
            picked = set(chosen)
            yield (
                tuple(word[p] for p in positions if p in picked),
                tuple(word[p] for p in positions if p not in picked),
            )


def _word_coproduct(word, proper=False):
    """{(left, right): multiplicity} for the (reduced) coproduct of a sorted word."""
    counts = {}
    for left, right in _splits(word):
        if proper and (not left or not right):
            continue
        counts[(left, right)] = counts.get((left, right), 0) + 1
    return counts


def coproduct(u):
    """Delta(f * w) = sum over position subsets S of w_S (x) f * w_complement."""
    pres = u.pres
    terms = {}
    for word, f in u.terms.items():
        for (left, right), n in _word_coproduct(word).items():
            piece = UElement(pres, {right: f * n})
            key = (left,)
            terms[key] = terms[key] + piece if key in terms else piece
    return UTensor(pres, 2, terms)


def reduced_coproduct(u):
    """Delta(u) - u (x) 1 - 1 (x) u."""
    pres = u.pres
    one = UElement.one(pres)
    return coproduct(u) - tensor_canonicalize([(u, one), (one, u)], pres)


def _reduce_first_slot(t):
    """(reduced Delta (x) id) on a canonical tensor: split the first left word."""
    terms = {}
    for key, right in t.terms.items():
        for (a, b), n in _word_coproduct(key[0], proper=True).items():
            new_key = (a, b) + key[1:]
            piece = right.scale(n)
            terms[new_key] = terms[new_key] + piece if new_key in terms else piece
    return UTensor(t.pres, t.arity + 1, terms)


def iterated_reduced_coproduct(u, n):
    t = reduced_coproduct(u)
    for _ in range(n - 1):
        if not t:
            break
        t = _reduce_first_slot(t)
    return t


def coproduct_first_slot(t):
    """(Delta (x) id) applied to a binary canonical tensor."""
    terms = {}
    for key, right in t.terms.items():
        for (a, b), n in _word_coproduct(key[0]).items():
            new_key = (a, b)
            piece = right.scale(n)
            terms[new_key] = terms[new_key] + piece if new_key in terms else piece
    return UTensor(t.pres, 3, terms)


def coproduct_last_slot(t):
    """(id (x) Delta) applied to a binary canonical tensor."""
    terms = {}
    for key, right in t.terms.items():
        for (inner,), piece in coproduct(right).terms.items():
            new_key = (key[0], inner)
            terms[new_key] = terms[new_key] + piece if new_key in terms else piece
    return UTensor(t.pres, 3, terms)


# ----------------------------
# Two-slot operator oracle
# ----------------------------
def tensor_oracle_witness(t, degree=None):
    """
    Evaluate sum w(p) * u_w(q) over basis pairs (p, q) of degree <= degree;
    returns the first nonzero value as a witness, or None when all vanish.
    The pairing respects the tensor relation, so a nonzero value proves t != 0.
    """
    degree = setting("RINEHART_ORACLE_PAIR_DEGREE", degree)
    pres = t.pres
    ring = pres.ring
    basis = [ring.monomial(m) for m in standard_monomials(ring, degree)]
    for p in basis:
        for q in basis:
            value = ring.zero
            for key, right in t.terms.items():
                value += act(_word(pres, key[0]), p) * act(right, q)
            value = reduce(value, ring)
            if value:
                return f"p={format_poly(p)}, q={format_poly(q)}: {format_poly(value)}"
    return None


# ----------------------------
# Primitives
# ----------------------------
def _require_counit_zero(u):
    if counit(u):
        raise CounitNonzero(f"Counit of {format_element(u)} is {format_poly(counit(u))}, expected 0")


def is_primitive(u, degree=None):
    """yes / no / undecided-at-truncation from the reduced coproduct."""
    _require_counit_zero(u)
    residue = reduced_coproduct(u)
    if not residue:
        return YES
    if u.pres.is_free:
        return NO
    if tensor_oracle_witness(residue, degree) is None:
        logger.info(f"primitivity of {format_element(u)} undecided: residue {format_tensor(residue)} vanishes on the oracle")
        return UNDECIDED_AT_TRUNCATION
    return NO


def primitive_filtration_level(u, max_n):
    """Smallest n <= max_n with the n-fold reduced coproduct vanishing, else None."""
    _require_counit_zero(u)
    if not u:
        return 0
    for n in range(1, max_n + 1):
        if not iterated_reduced_coproduct(u, n):
            return n
    return None


def _require_free(pres, what):
    if not pres.is_free:
        raise NonFreePresentation(f"{what} needs a free presentation; {pres} has syzygies")


def _sorted_words(size, max_length):
    words = []
    for length in range(max_length + 1):
        block = [tuple(sorted(c)) for c in _multisets(size, length)]
        words.extend(sorted(set(block)))
    return words


def _multisets(size, length):
    if length == 0:
        return [()]
    out = []
    for head in range(size):
        for rest in _multisets(size, length - 1):
            if not rest or rest[0] >= head:
                out.append((head,) + rest)
    return out


def solve_primitives(pres, degree, max_length):
    """QQ-basis of {u : reduced Delta(u) = 0} over words of length <= max_length, coefficient degree <= degree."""
    _require_free(pres, "Solving for primitives")
    if max_length <= 0:
        return []
    ring = pres.ring
    columns = [
        (word, m)
        for word in _sorted_words(pres.size, max_length)
        for m in standard_monomials(ring, degree)
    ]
    images = [reduced_coproduct(UElement(pres, {word: ring.monomial(m)})) for word, m in columns]
    coordinates = sorted({
        (key, word, mono)
        for image in images
        for key, right in image.terms.items()
        for word, coeff in right.terms.items()
        for mono in coeff.itermonoms()
    })
    rows = [
        [
            image.terms[key].terms.get(word, ring.zero).get(mono, QQ(0)) if key in image.terms else QQ(0)
            for image in images
        ]
        for key, word, mono in coordinates
    ]
    logger.debug(f"primitive system for {pres}: {len(rows)} equations, {len(columns)} unknowns")
    basis = []
    for vector in nullspace(rows, len(columns)):
        terms = {}
        for (word, m), value in zip(columns, vector):
            if value:
                terms[word] = terms.get(word, ring.zero) + value * ring.monomial(m)
        basis.append(UElement(pres, terms))
    return basis


def primitive_anchor(u):
    """The derivation f -> eps(u * f), read off on the variables."""
    ring = u.pres.ring
    coeffs = [counit(multiply(u, UElement.ring_element(u.pres, x))) for x in ring.gens]
    return Derivation(ring, coeffs)


# ----------------------------
# Axiom report
# ----------------------------
def counit_axioms_check(pres, samples=None, seed=None, max_length=3, coeff_degree=2):
    """Bialgebra identities on pseudo-random samples; exact equalities need a free presentation."""
    samples = setting("RINEHART_SUITE_SAMPLES", samples)
    rng = make_rng(seed)
    one = UElement.one(pres)
    report = Report(command=f"hopf axioms {pres} --samples {samples}")

    unit_tensor = tensor_canonicalize([(one, one)], pres)
    report.add(check("unit", coproduct(one) == unit_tensor and counit(one) == pres.ring.one))

    failures = {name: None for name in ("multiplicative", "coassociative", "cocommutative", "counit", "counit product")}
    for n in range(samples):
        u = random_element(pres, rng, max_length, coeff_degree)
        v = random_element(pres, rng, max_length, coeff_degree)
        delta = coproduct(u)
        if failures["counit"] is None and (counit_left(delta) != u or counit_right(delta) != u):
            failures["counit"] = format_element(u)
        eps_uv = counit(multiply(u, v))
        eps_u_epsv = counit(multiply(u, UElement.ring_element(pres, counit(v))))
        if failures["counit product"] is None and eps_uv != eps_u_epsv:
            failures["counit product"] = f"u={format_element(u)}, v={format_element(v)}"
        if not pres.is_free:
            continue
        if failures["multiplicative"] is None and coproduct(multiply(u, v)) != tensor_multiply(delta, coproduct(v)):
            failures["multiplicative"] = f"u={format_element(u)}, v={format_element(v)}"
        if failures["coassociative"] is None and coproduct_first_slot(delta) != coproduct_last_slot(delta):
            failures["coassociative"] = format_element(u)
        if failures["cocommutative"] is None and tensor_swap(delta) != delta:
            failures["cocommutative"] = format_element(u)

    for name, witness in failures.items():
        if not pres.is_free and name in ("multiplicative", "coassociative", "cocommutative"):
            report.add(Check(name, UNDECIDED, None, "exact tensor equality needs a free presentation"))
        else:
            report.add(check(name, witness is None, witness))
    return report


# ----------------------------
# Jets
# ----------------------------
@dataclass(frozen=True)
class JetElement:
    """An R-linear functional on U_(order), stored by its values on sorted words."""

    pres: object
    order: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        ring = self.pres.ring
        cleaned = {}
        for word, value in self.values.items():
            word = tuple(word)
            if len(word) > self.order:
                raise DegreeExceeded(f"Jet of order {self.order} has a value on a word of length {len(word)}")
            value = reduce(ring.coerce(value), ring)
            if value:
                cleaned[word] = value
        object.__setattr__(self, "values", cleaned)

    def __call__(self, word):
        return self.values.get(tuple(word), self.pres.ring.zero)


def epsilon_jet(pres, order):
    return JetElement(pres, order, {(): pres.ring.one})


def dual_basis_jet(pres, word, order):
    return JetElement(pres, order, {tuple(word): pres.ring.one})


def jet_pair(phi, u):
    _require_free(phi.pres, "Pairing jets")
    if filtration_degree(u) > phi.order:
        raise DegreeExceeded(f"Element of filtration degree {filtration_degree(u)} exceeds jet order {phi.order}")
    ring = phi.pres.ring
    return reduce(sum((f * phi(w) for w, f in u.terms.items()), ring.zero), ring)


def jet_counit(phi):
    return phi(())


def jet_multiply(phi1, phi2):
    """(phi1 phi2)(w) = sum phi1(w_(1)) phi2(w_(2)) over the canonical coproduct of w."""
    _require_free(phi1.pres, "Multiplying jets")
    if phi1.order != phi2.order:
        raise LengthMismatch(f"Jets of orders {phi1.order} and {phi2.order} cannot be multiplied")
    pres = phi1.pres
    values = {}
    for word in _sorted_words(pres.size, phi1.order):
        total = pres.ring.zero
        for (left,), right in coproduct(_word(pres, word)).terms.items():
            total += phi1(left) * jet_pair(phi2, right)
        values[word] = total
    return JetElement(pres, phi1.order, values)


def _reversed_product(pres, word):
    u = UElement.one(pres)
    for index in reversed(word):
        u = multiply(u, UElement.generator(pres, index))
    return u


def jet_basis_check(pres, order):
    """
    Order-by-order duality: dual jets are independent and products of
    degree-one dual jets give multinomial values on sorted words.
    """
    _require_free(pres, "Jet duality")
    report = Report(command=f"hopf jets {pres} --order {order}")
    words = _sorted_words(pres.size, order)
    duals = [dual_basis_jet(pres, w, order) for w in words]
    # Generator products taken in reverse order normalize to their sorted word plus shorter words.
    products = [_reversed_product(pres, w) for w in words]
    bad = [
        f"{format_word(pres, words[i]) or '1'} on {format_element(products[j])}"
        for i, phi in enumerate(duals)
        for j in range(len(words))
        if len(words[i]) >= len(words[j])
        and jet_pair(phi, products[j]) != (pres.ring.one if i == j else pres.ring.zero)
    ]
    report.add(check("dual basis", not bad, "; ".join(bad[:5])))

    eps = epsilon_jet(pres, order)
    report.add(check("epsilon neutral", all(jet_multiply(eps, phi) == phi for phi in duals)))

    bad = []
    for word in words:
        if not word:
            continue
        product = epsilon_jet(pres, order)
        for index in word:
            product = jet_multiply(product, dual_basis_jet(pres, (index,), order))
        expected = prod(factorial(len([i for i in word if i == k])) for k in set(word))
        for other in words:
            value = product(other)
            target = expected if other == word else 0
            if value != pres.ring.coerce(target):
                bad.append(f"{format_word(pres, word)} on {format_word(pres, other) or '1'}: {format_poly(value)}")
    report.add(check("multinomial values", not bad, "; ".join(bad[:5])))
    report.result = {"words": len(words), "dual_jets": len(duals)}
    return report


# ----------------------------
# R^e = R (x)_K R^op
# ----------------------------
@dataclass(frozen=True)
class REElement:
    ctx: object
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for (a, b), c in self.terms.items():
            c = QQ.convert(c)
            cleaned[(tuple(a), tuple(b))] = cleaned.get((tuple(a), tuple(b)), QQ(0)) + c
        object.__setattr__(self, "terms", {k: v for k, v in cleaned.items() if v})

    @classmethod
    def from_polys(cls, ctx, a, b):
        """a (x) b for ring elements a, b, expanded into reduced monomials."""
        a = reduce(ctx.coerce(a), ctx)
        b = reduce(ctx.coerce(b), ctx)
        return cls(ctx, {(ma, mb): ca * cb for ma, ca in a.iterterms() for mb, cb in b.iterterms()})

    def __add__(self, other):
        _re_same(self, other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, QQ(0)) + c
        return REElement(self.ctx, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        ring = self.ctx
        return " + ".join(
            f"{format_poly(ring.ring.ground_new(c))}*({format_poly(ring.monomial(a))} (x) {format_poly(ring.monomial(b))})"
            for (a, b), c in sorted(self.terms.items())
        )


def _re_same(a, b):
    if a.ctx != b.ctx:
        raise ContextMismatch(f"R^e elements over {a.ctx} and {b.ctx}")


def re_unit(ctx):
    return REElement.from_polys(ctx, ctx.one, ctx.one)


def re_source(ctx, r):
    return REElement.from_polys(ctx, r, ctx.one)


def re_target(ctx, r):
    return REElement.from_polys(ctx, ctx.one, r)


def re_multiply(x, y):
    """(a1 (x) b1)(a2 (x) b2) = a1 a2 (x) b2 b1."""
    _re_same(x, y)
    ctx = x.ctx
    total = REElement(ctx)
    for (a1, b1), c1 in x.terms.items():
        for (a2, b2), c2 in y.terms.items():
            piece = REElement.from_polys(ctx, ctx.monomial(a1) * ctx.monomial(a2), ctx.monomial(b2) * ctx.monomial(b1))
            total = total + REElement(ctx, {k: v * c1 * c2 for k, v in piece.terms.items()})
    return total


def re_coproduct(x):
    """Delta(a (x) b) = (a (x) 1) (x)_R (1 (x) b), as (coefficient, left, right) triples."""
    ctx = x.ctx
    return [
        (c, re_source(ctx, ctx.monomial(a)), re_target(ctx, ctx.monomial(b)))
        for (a, b), c in sorted(x.terms.items())
    ]


def re_counit(x):
    """eps(a (x) b) = ab."""
    ctx = x.ctx
    total = ctx.zero
    for (a, b), c in x.terms.items():
        total += ctx.monomial(a) * ctx.monomial(b) * c
    return reduce(total, ctx)


def random_re_element(ctx, rng, degree=2, terms=3):
    basis = standard_monomials(ctx, degree)
    return REElement(ctx, {(rng.choice(basis), rng.choice(basis)): random_rational(rng) for _ in range(terms)})


def re_axioms_check(ctx, samples=None, seed=None):
    samples = setting("RINEHART_SUITE_SAMPLES", samples)
    rng = make_rng(seed)
    report = Report(command=f"hopf re-axioms {ctx} --samples {samples}")
    unit = re_unit(ctx)
    failures = {name: None for name in ("associative", "unit", "left counit", "right counit", "counit product")}
    for _ in range(samples):
        x, y, z = (random_re_element(ctx, rng) for _ in range(3))
        if failures["associative"] is None and re_multiply(re_multiply(x, y), z) != re_multiply(x, re_multiply(y, z)):
            failures["associative"] = f"{x}; {y}; {z}"
        if failures["unit"] is None and (re_multiply(unit, x) != x or re_multiply(x, unit) != x):
            failures["unit"] = str(x)
        left = REElement(ctx)
        right = REElement(ctx)
        for c, a, b in re_coproduct(x):
            scaled = REElement(ctx, {k: v * c for k, v in b.terms.items()})
            left = left + re_multiply(re_source(ctx, re_counit(a)), scaled)
            right = right + re_multiply(a, re_target(ctx, re_counit(scaled)))
        if failures["left counit"] is None and left != x:
            failures["left counit"] = str(x)
        if failures["right counit"] is None and right != x:
            failures["right counit"] = str(x)
        if failures["counit product"] is None and re_counit(re_multiply(x, y)) != re_counit(re_multiply(x, re_source(ctx, re_counit(y)))):
            failures["counit product"] = f"{x}; {y}"
    for name, witness in failures.items():
        report.add(check(name, witness is None, witness))
    return report


# ----------------------------
# The normal-crossing tensor claim
# ----------------------------
def normal_crossing_claim(pres, truncation=None, degree=None):
    """
    Put side by side the claim b (x)_R a = 0 over Q[x,y]/(xy), which the
    implemented relations cannot decide, and the operator fact a*b = 0 on R.
    The report is undecided by construction.
    """
    truncation = setting("RINEHART_TRUNCATION", truncation)
    a = UElement.generator(pres, 0)
    b = UElement.generator(pres, 1)
    checks = []
    for first, second, label in ((b, a, "y*dy (x)_R x*dx = 0"), (a, b, "x*dx (x)_R y*dy = 0")):
        tensor = tensor_canonicalize([(first, second)], pres)
        witness = tensor_oracle_witness(tensor, degree)
        if witness is None:
            detail = f"word-level tensor {format_tensor(tensor)} is nonzero; two-slot oracle vanishes on all basis pairs"
            checks.append(Check(label, UNDECIDED, None, detail))
        else:
            checks.append(Check(label, FAIL, witness, "two-slot oracle is nonzero"))
    for first, second, label in ((a, b, "x*dx o y*dy = 0 on R"), (b, a, "y*dy o x*dx = 0 on R")):
        comparison = operator_equal(multiply(first, second), UElement.zero(pres), truncation)
        checks.append(Check(label, PASS if comparison.equal else FAIL, comparison.witness, comparison.status))
    ab = multiply(a, b)
    checks.append(Check(
        "a*b primitive", UNDECIDED if is_primitive(ab, degree) == UNDECIDED_AT_TRUNCATION else FAIL,
        None, f"reduced coproduct {format_tensor(reduced_coproduct(ab))}",
    ))
    status = FAIL if any(c.status == FAIL for c in checks) else UNDECIDED
    return Report(command="hopf claim normal-crossing", checks=checks, status=status)
