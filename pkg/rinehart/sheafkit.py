"""
Presheaves of finite-dimensional rational vector spaces on finite
Alexandrov spaces.

Opens of a finite poset are its up-closed subsets; the smallest open
containing x is the up-set U_x, so the stalk at x is F(U_x). Sections of
the sheafification over U are the families (s_x) of stalk elements with
res(U_x, U_y) s_x = s_y for all x <= y in U.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import networkx as nx
from sympy import Matrix, eye, zeros
from sympy.polys.domains import QQ

from .exceptions import FixtureError, UnknownPoint
from .reports import HYPOTHESIS_VIOLATED, PASS, Check, Report, check
from .utils import kernel, make_rng, random_rational

logger = logging.getLogger(__name__)


# ----------------------------
# Posets
# ----------------------------
class FinitePoset:
    def __init__(self, elements, relations=(), name=""):
        self.elements = tuple(elements)
        self.name = name or f"poset{list(self.elements)}"
        if len(set(self.elements)) != len(self.elements):
            raise FixtureError(f"Duplicate poset elements in {list(self.elements)}")
        graph = nx.DiGraph()
        graph.add_nodes_from(self.elements)
        for a, b in relations:
            if a not in graph or b not in graph:
                raise FixtureError(f"Order pair ({a}, {b}) mentions an unknown element")
            if a != b:
                graph.add_edge(a, b)
        if not nx.is_directed_acyclic_graph(graph):
            raise FixtureError("Order relation is not antisymmetric")
        self.graph = nx.transitive_closure_dag(graph)

    def __contains__(self, x):
        return x in self.graph

    def __repr__(self):
        return f"FinitePoset({self.name})"

    def leq(self, a, b):
        return a == b or self.graph.has_edge(a, b)

    def relations(self):
        """Covering pairs (a, b) with a < b, in element order."""
        reduced = nx.transitive_reduction(self.graph)
        return sorted(reduced.edges(), key=lambda e: (self.elements.index(e[0]), self.elements.index(e[1])))

    def ordered(self, subset):
        return [x for x in self.elements if x in subset]

    def minimal_open(self, x):
        if x not in self:
            raise UnknownPoint(f"{x!r} is not a point of {self.name}")
        return frozenset({x} | nx.descendants(self.graph, x))

    def is_open(self, subset):
        return all(y in subset for x in subset for y in nx.descendants(self.graph, x))

    @cached_property
    def opens(self):
        found = []
        for size in range(len(self.elements) + 1):
            for combo in combinations(self.elements, size):
                subset = frozenset(combo)
                if self.is_open(subset):
                    found.append(subset)
        return found

    def minimal_elements(self):
        return [x for x in self.elements if self.graph.in_degree(x) == 0]

    def label(self, subset):
        return "{" + ",".join(str(x) for x in self.ordered(subset)) + "}"


def chain(n):
    elements = [f"p{i}" for i in range(n)]
    return FinitePoset(elements, zip(elements, elements[1:]), name=f"chain{n}")


def antichain(n):
    return FinitePoset([f"p{i}" for i in range(n)], name=f"antichain{n}")


def v_poset():
    """x, y <= z."""
    return FinitePoset(["x", "y", "z"], [("x", "z"), ("y", "z")], name="V")


SHAPES = {"chain": lambda: chain(3), "antichain": lambda: antichain(3), "V": v_poset}


# ----------------------------
# Presheaves and morphisms
# ----------------------------
def _invertible(m):
    return m.rows == m.cols and (m.rows == 0 or m.rank() == m.rows)


def _embed(target, block):
    """Copy block into the top-left corner of target."""
    for r in range(block.rows):
        for c in range(block.cols):
            target[r, c] = block[r, c]
    return target


def _matrix(rows, nrows, ncols):
    if nrows == 0 or ncols == 0:
        return zeros(nrows, ncols)
    return Matrix(rows)


@dataclass
class PresheafFS:
    """Per-open dimensions and restriction matrices res(U, V): F(U) -> F(V) for V subset of U."""

    poset: FinitePoset
    dims: dict
    maps: dict = field(default_factory=dict)

    def __post_init__(self):
        for U in self.poset.opens:
            if U not in self.dims:
                raise FixtureError(f"No dimension given for the open {self.poset.label(U)}")
        for (U, V), m in self.maps.items():
            if not V <= U:
                raise FixtureError(f"Restriction {self.poset.label(U)} -> {self.poset.label(V)} is not an inclusion")
            if m.shape != (self.dims[V], self.dims[U]):
                raise FixtureError(
                    f"Restriction {self.poset.label(U)} -> {self.poset.label(V)} has shape {m.shape}, "
                    f"expected {(self.dims[V], self.dims[U])}"
                )

    def res(self, U, V):
        U, V = frozenset(U), frozenset(V)
        if U == V and (U, V) not in self.maps:
            return eye(self.dims[U])
        try:
            return self.maps[(U, V)]
        except KeyError:
            raise FixtureError(f"Missing restriction {self.poset.label(U)} -> {self.poset.label(V)}")

    def pairs(self):
        return [(U, V) for U in self.poset.opens for V in self.poset.opens if V <= U]


@dataclass
class PresheafMorphism:
    source: PresheafFS
    target: PresheafFS
    maps: dict

    def __post_init__(self):
        if self.source.poset is not self.target.poset:
            raise FixtureError("Morphism between presheaves on different posets")
        for U in self.source.poset.opens:
            m = self.maps.get(U)
            if m is None or m.shape != (self.target.dims[U], self.source.dims[U]):
                raise FixtureError(f"Morphism component on {self.source.poset.label(U)} is missing or misshapen")

    def commutes(self):
        return all(
            self.maps[V] * self.source.res(U, V) == self.target.res(U, V) * self.maps[U]
            for U, V in self.source.pairs()
        )

    def stalk_map(self, x):
        return self.maps[self.source.poset.minimal_open(x)]


def is_functorial(F):
    opens = F.poset.opens
    for U in opens:
        if F.res(U, U) != eye(F.dims[U]):
            return False
    for U in opens:
        for V in opens:
            if not V <= U:
                continue
            for W in opens:
                if W <= V and F.res(V, W) * F.res(U, V) != F.res(U, W):
                    return False
    return True


@dataclass
class Stalk:
    point: object
    open: frozenset
    dim: int
    germs: dict


def stalk(F, x):
    """F(U_x) with the germ maps F(U) -> F(U_x) for every open U containing x."""
    Ux = F.poset.minimal_open(x)
    germs = {U: F.res(U, Ux) for U in F.poset.opens if x in U}
    return Stalk(x, Ux, F.dims[Ux], germs)


# ----------------------------
# Sheafification
# ----------------------------
@dataclass
class FamilySpace:
    """Compatible families over an open: kernel basis and the free columns that give coordinates."""

    points: list
    offsets: dict
    basis: Matrix
    free: list

    @property
    def dim(self):
        return len(self.free)

    def selector(self):
        total = self.basis.rows
        return _matrix([[1 if j == i else 0 for j in range(total)] for i in self.free], len(self.free), total)


def _families(poset, U, dims, maps):
    points = poset.ordered(U)
    offsets = {}
    total = 0
    for x in points:
        offsets[x] = total
        total += dims[x]
    constraints = []
    for x in points:
        for y in points:
            if x == y or not poset.leq(x, y):
                continue
            m = maps[(x, y)]
            for r in range(dims[y]):
                row = [0] * total
                for c in range(dims[x]):
                    row[offsets[x] + c] = m[r, c]
                row[offsets[y] + r] -= 1
                constraints.append(row)
    basis, free = kernel(_matrix(constraints, len(constraints), total))
    return FamilySpace(points, offsets, basis, free)


def _projection(space_from, space_to, dims):
    """Forget the components of points outside the smaller open."""
    rows = space_to.basis.rows
    cols = space_from.basis.rows
    m = zeros(rows, cols)
    for x in space_to.points:
        for k in range(dims[x]):
            m[space_to.offsets[x] + k, space_from.offsets[x] + k] = 1
    return m


def _restriction(space_from, space_to, dims):
    return space_to.selector() * _projection(space_from, space_to, dims) * space_from.basis


def sheaf_from_stalks(poset, dims, maps):
    """
    The sheaf of compatible families for point data: a space per point and
    maps (x, y) for x < y. Returns the sheaf and its family spaces.
    """
    spaces = {U: _families(poset, U, dims, maps) for U in poset.opens}
    sheaf_dims = {U: spaces[U].dim for U in poset.opens}
    sheaf_maps = {
        (U, V): _restriction(spaces[U], spaces[V], dims)
        for U in poset.opens for V in poset.opens if V <= U and V != U
    }
    return PresheafFS(poset, sheaf_dims, sheaf_maps), spaces


def _point_data(F):
    poset = F.poset
    dims = {x: F.dims[poset.minimal_open(x)] for x in poset.elements}
    maps = {
        (x, y): F.res(poset.minimal_open(x), poset.minimal_open(y))
        for x in poset.elements for y in poset.elements if x != y and poset.leq(x, y)
    }
    return dims, maps


def sheafify(F):
    sheaf, _ = sheaf_from_stalks(F.poset, *_point_data(F))
    return sheaf


def unit_map(F):
    """eta: F -> F#, s |-> (germ of s at x) for x in U, in family coordinates."""
    poset = F.poset
    dims, maps = _point_data(F)
    sheaf, spaces = sheaf_from_stalks(poset, dims, maps)
    components = {}
    for U in poset.opens:
        space = spaces[U]
        blocks = zeros(space.basis.rows, F.dims[U])
        for x in space.points:
            germ = F.res(U, poset.minimal_open(x))
            for r in range(dims[x]):
                for c in range(F.dims[U]):
                    blocks[space.offsets[x] + r, c] = germ[r, c]
        components[U] = space.selector() * blocks
    return PresheafMorphism(F, sheaf, components)


def is_sheaf(F):
    eta = unit_map(F)
    return all(_invertible(eta.maps[U]) for U in F.poset.opens)


def sheafify_morphism(psi):
    """psi#: F1# -> F2#, acting on families through the stalk maps."""
    poset = psi.source.poset
    dims1, maps1 = _point_data(psi.source)
    dims2, maps2 = _point_data(psi.target)
    sheaf1, spaces1 = sheaf_from_stalks(poset, dims1, maps1)
    sheaf2, spaces2 = sheaf_from_stalks(poset, dims2, maps2)
    components = {}
    for U in poset.opens:
        s1, s2 = spaces1[U], spaces2[U]
        block = zeros(s2.basis.rows, s1.basis.rows)
        for x in s1.points:
            m = psi.stalk_map(x)
            for r in range(dims2[x]):
                for c in range(dims1[x]):
                    block[s2.offsets[x] + r, s1.offsets[x] + c] = m[r, c]
        components[U] = s2.selector() * block * s1.basis
    return PresheafMorphism(sheaf1, sheaf2, components)


def factor_through_sheafification(phi):
    """For phi: F -> G with G a sheaf, the morphism F# -> G through which phi factors."""
    if not is_sheaf(phi.target):
        raise FixtureError("The target of the factorization must be a sheaf")
    sharp = sheafify_morphism(phi)
    eta_target = unit_map(phi.target)
    components = {U: eta_target.maps[U].inv() * sharp.maps[U] if sharp.maps[U].rows else sharp.maps[U]
                  for U in phi.source.poset.opens}
    return PresheafMorphism(sharp.source, phi.target, components)


# ----------------------------
# Checks
# ----------------------------
def universal_property_check(phi):
    report = Report(command="sheaf universal")
    factor = factor_through_sheafification(phi)
    eta = unit_map(phi.source)
    bad = [phi.source.poset.label(U) for U in phi.source.poset.opens
           if factor.maps[U] * eta.maps[U] != phi.maps[U]]
    report.add(check("factors", not bad, ", ".join(bad)))
    report.add(check("morphism", factor.commutes()))
    return report


def sheaf_check(F):
    """Functoriality, sheaf property, idempotence and stalk preservation of one presheaf."""
    report = Report(command=f"sheaf check {F.poset.name}")
    report.add(check("functorial", is_functorial(F)))
    report.add(Check("is sheaf", PASS, None, str(is_sheaf(F)).lower()))
    sharp = sheafify(F)
    report.add(check("sheafification is a sheaf", is_sheaf(sharp)))
    twice = sheafify(sharp)
    report.add(check(
        "idempotent",
        all(sharp.dims[U] == twice.dims[U] for U in F.poset.opens) and all(_invertible(m) for m in unit_map(sharp).maps.values()),
    ))
    eta = unit_map(F)
    bad = [str(x) for x in F.poset.elements if not _invertible(eta.stalk_map(x))]
    report.add(check("stalks preserved", not bad, ", ".join(bad)))
    report.result = {F.poset.label(U): sharp.dims[U] for U in F.poset.opens}
    return report


def check_lemma_stalkwise_to_sheaf(psi):
    """Invertible stalk maps make the sheafified morphism invertible on every open."""
    poset = psi.source.poset
    report = Report(command=f"sheaf lemma1 {poset.name}")
    singular = [str(x) for x in poset.elements if not _invertible(psi.stalk_map(x))]
    if singular:
        report.add(Check("stalkwise isomorphism", HYPOTHESIS_VIOLATED, ", ".join(singular), "hypothesis violated"))
        report.status = HYPOTHESIS_VIOLATED
        logger.info(f"lemma check on {poset.name}: stalk maps singular at {singular}")
        return report
    report.add(Check("stalkwise isomorphism", PASS))
    sharp = sheafify_morphism(psi)
    bad = [poset.label(U) for U in poset.opens if not _invertible(sharp.maps[U])]
    report.add(check("sheafified isomorphism", not bad, ", ".join(bad)))
    return report


def check_lemma_local_to_stalkwise(psi, cover):
    """A morphism invertible on all opens inside each cover member is invertible on every stalk."""
    poset = psi.source.poset
    cover = [frozenset(W) for W in cover]
    for W in cover:
        if W not in poset.opens:
            raise FixtureError(f"Cover member {poset.label(W)} is not open")
    if frozenset().union(*cover) != frozenset(poset.elements):
        raise FixtureError("The cover does not cover the space")
    report = Report(command=f"sheaf lemma2 {poset.name}")
    singular = [poset.label(V) for W in cover for V in poset.opens if V <= W and not _invertible(psi.maps[V])]
    if singular:
        report.add(Check("local isomorphism", HYPOTHESIS_VIOLATED, ", ".join(singular), "hypothesis violated"))
        report.status = HYPOTHESIS_VIOLATED
        return report
    report.add(Check("local isomorphism", PASS))
    bad = [str(x) for x in poset.elements if not _invertible(psi.stalk_map(x))]
    report.add(check("stalkwise isomorphism", not bad, ", ".join(bad)))
    return report


def minimal_cover(poset):
    """{U_x : x minimal}, which covers every finite poset."""
    return [poset.minimal_open(x) for x in poset.minimal_elements()]


# ----------------------------
# Fixtures
# ----------------------------
def _rational(rng):
    return QQ.to_sympy(random_rational(rng, spread=3))


def random_invertible(rng, n):
    """Product of random unit lower and upper triangular matrices with a nonzero diagonal."""
    lower = eye(n)
    upper = eye(n)
    for i in range(n):
        for j in range(i):
            lower[i, j] = _rational(rng)
            upper[j, i] = _rational(rng)
        upper[i, i] = rng.choice([1, 2, 3, -1])
    return lower * upper


def constant_presheaf(poset, dim=1, empty_dim=0):
    dims = {U: (dim if U else empty_dim) for U in poset.opens}
    maps = {}
    for U in poset.opens:
        for V in poset.opens:
            if V <= U and V != U:
                maps[(U, V)] = eye(dim) if V else zeros(empty_dim, dim)
    return PresheafFS(poset, dims, maps)


def random_sheaf(poset, rng, ambient_dim=3):
    """
    Compatible families of a random point representation V_x = Q^n / K_x
    with K monotone, conjugated by random changes of basis.
    """
    activation = [rng.choice(list(poset.elements) + [None]) for _ in range(ambient_dim)]
    kept = {
        x: [i for i, a in enumerate(activation) if a is None or not poset.leq(a, x)]
        for x in poset.elements
    }
    change = {x: random_invertible(rng, len(kept[x])) for x in poset.elements}
    dims = {x: len(kept[x]) for x in poset.elements}
    maps = {}
    for x in poset.elements:
        for y in poset.elements:
            if x == y or not poset.leq(x, y):
                continue
            project = zeros(dims[y], dims[x])
            for r, i in enumerate(kept[y]):
                project[r, kept[x].index(i)] = 1
            inverse = change[x].inv() if dims[x] else change[x]
            maps[(x, y)] = change[y] * project * inverse
    sheaf, _ = sheaf_from_stalks(poset, dims, maps)
    return sheaf


def pad_presheaf(F, rng, max_extra=2):
    """
    Add junk summands on every open that is not a minimal open; junk restricts
    to zero. Stalks are untouched, so sheafify(pad(F)) is isomorphic to sheafify(F).
    Returns the padded presheaf and the projection onto F.
    """
    poset = F.poset
    minimal = {poset.minimal_open(x) for x in poset.elements}
    extra = {U: (0 if U in minimal else rng.randint(1, max_extra)) for U in poset.opens}
    dims = {U: F.dims[U] + extra[U] for U in poset.opens}
    maps = {}
    for U, V in F.pairs():
        if U == V:
            continue
        maps[(U, V)] = _embed(zeros(dims[V], dims[U]), F.res(U, V))
    padded = PresheafFS(poset, dims, maps)
    projection = {}
    for U in poset.opens:
        projection[U] = _embed(zeros(F.dims[U], dims[U]), eye(F.dims[U]))
    return padded, PresheafMorphism(padded, F, projection)


def conjugate_presheaf(F, rng):
    """F with res'(U, V) = g_V res(U, V) g_U^-1; returns it and g: F -> F'."""
    g = {U: random_invertible(rng, F.dims[U]) for U in F.poset.opens}
    maps = {}
    for U, V in F.pairs():
        if U == V:
            continue
        inverse = g[U].inv() if F.dims[U] else g[U]
        maps[(U, V)] = g[V] * F.res(U, V) * inverse
    image = PresheafFS(F.poset, dict(F.dims), maps)
    return image, PresheafMorphism(F, image, g)


def compose(phi, psi):
    """phi after psi."""
    return PresheafMorphism(psi.source, phi.target, {U: phi.maps[U] * psi.maps[U] for U in psi.source.poset.opens})


def random_lemma1_fixture(poset, rng):
    """Stalkwise invertible morphism that fails to be invertible on the padded opens."""
    sheaf = random_sheaf(poset, rng)
    padded, projection = pad_presheaf(sheaf, rng)
    image, g = conjugate_presheaf(sheaf, rng)
    return compose(g, projection)


def random_lemma2_fixture(poset, rng):
    """A presheaf isomorphism built by conjugation: locally invertible on any cover."""
    padded, _ = pad_presheaf(random_sheaf(poset, rng), rng)
    _, g = conjugate_presheaf(padded, rng)
    return g


def identity_morphism(F):
    return PresheafMorphism(F, F, {U: eye(F.dims[U]) for U in F.poset.opens})


def zero_morphism(F, G):
    return PresheafMorphism(F, G, {U: zeros(G.dims[U], F.dims[U]) for U in F.poset.opens})


def empty_set_fixture():
    """The constant presheaf on a two-point chain with F(empty) = Q."""
    return constant_presheaf(chain(2), 1, empty_dim=1)


def gluing_fixture():
    """Two incomparable points, F = Q everywhere nonempty, identity restrictions."""
    return constant_presheaf(antichain(2), 1)


def chain_stalk_fixture():
    """x < y with F({x,y}) = Q^2 and F({y}) = Q."""
    poset = FinitePoset(["x", "y"], [("x", "y")], name="chain-xy")
    whole, top, empty = frozenset({"x", "y"}), frozenset({"y"}), frozenset()
    dims = {whole: 2, top: 1, empty: 0}
    maps = {(whole, top): Matrix([[1, 0]]), (whole, empty): zeros(0, 2), (top, empty): zeros(0, 1)}
    return PresheafFS(poset, dims, maps)


def lemma1_fixture():
    """On the V poset: constant sheaf plus a junk line on the whole space, projected away."""
    poset = v_poset()
    sheaf = constant_presheaf(poset, 1)
    whole = frozenset(poset.elements)
    dims = dict(sheaf.dims)
    dims[whole] = 2
    maps = {}
    for U, V in sheaf.pairs():
        if U == V:
            continue
        maps[(U, V)] = _embed(zeros(dims[V], dims[U]), sheaf.res(U, V))
    padded = PresheafFS(poset, dims, maps)
    projection = {U: eye(1) if U != whole else Matrix([[1, 0]]) for U in poset.opens if U}
    projection[frozenset()] = zeros(0, 0)
    return PresheafMorphism(padded, sheaf, projection)


def randomized_lemma_suite(shapes=None, fixtures=100, seed=None):
    """Both lemma checks, idempotence and stalk preservation over random fixtures per poset shape."""
    rng = make_rng(seed)
    shapes = shapes or list(SHAPES)
    report = Report(command=f"sheaf random --fixtures {fixtures}")
    for shape in shapes:
        poset = SHAPES[shape]()
        failures = {"lemma1": None, "lemma2": None, "idempotent": None, "stalks preserved": None}
        for n in range(fixtures):
            psi = random_lemma1_fixture(poset, rng)
            if failures["lemma1"] is None and check_lemma_stalkwise_to_sheaf(psi).status != PASS:
                failures["lemma1"] = f"fixture {n}"
            g = random_lemma2_fixture(poset, rng)
            if failures["lemma2"] is None and check_lemma_local_to_stalkwise(g, minimal_cover(poset)).status != PASS:
                failures["lemma2"] = f"fixture {n}"
            sheaf_report = sheaf_check(psi.source)
            for name in ("idempotent", "stalks preserved"):
                if failures[name] is None and any(c.name == name and c.failed for c in sheaf_report.checks):
                    failures[name] = f"fixture {n}"
        for name, witness in failures.items():
            report.add(check(f"{shape}: {name}", witness is None, witness))
    return report
