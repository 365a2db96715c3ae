"""
The verification suite: exact identities and seeded property runs over the
desk-scale presentations, one report per item, assembled in item order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from .bialgebra import (
    counit_axioms_check,
    dual_basis_jet,
    epsilon_jet,
    jet_basis_check,
    jet_multiply,
    normal_crossing_claim,
    primitive_filtration_level,
    re_axioms_check,
    solve_primitives,
)
from .derivation import (
    Derivation,
    apply,
    bracket,
    euler_field,
    fiber_rank,
    log_derivation_report,
    nilpotent_cone,
    normal_crossing_ambient,
    normal_crossing_quotient,
    same_span,
    solve_log_derivations,
    span_contains,
    verify_syzygy,
    weyl_a1,
)
from .enveloping import (
    UElement,
    counit,
    evaluate_operator,
    filtration_degree,
    format_element,
    multiply,
    random_element,
    random_tensor,
    symbol,
    symmetrize,
)
from .polyring import RingCtx, format_poly, random_poly
from .reports import PASS, Check, Report, check
from .sheafkit import (
    check_lemma_stalkwise_to_sheaf,
    empty_set_fixture,
    is_sheaf,
    lemma1_fixture,
    randomized_lemma_suite,
    sheafify,
)
from .utils import make_rng, setting

logger = logging.getLogger(__name__)


def _first_failure(failures):
    return next((w for w in failures if w), None)


def cone_identities(samples, seed, truncation):
    pres = nilpotent_cone()
    ring = pres.ring
    report = Report(command="nilpotent-cone identities")
    f = ring.parse("x^2 + 4*y*z")
    for name, D in zip(pres.names, pres.generators):
        report.add(check(f"{name}(x^2 + 4*y*z) = 0", not apply(D, f), format_poly(apply(D, f))))
    report.add(check("syzygy (x, 2*z, 2*y)", verify_syzygy(pres.syzygies[0], pres)))
    Dx, Dy, Dz = pres.generators
    expected = {(0, 1): Dy.scale(2), (0, 2): Dz.scale(-2), (1, 2): Dx}
    for (i, j), value in expected.items():
        actual = bracket(pres.generators[i], pres.generators[j])
        report.add(check(f"[{pres.names[i]},{pres.names[j]}]", actual == value, str(actual)))
    return report


def normal_crossing_solver(samples, seed, truncation):
    ctx = RingCtx(("x", "y"), "x*y")
    basis = solve_log_derivations(ctx, 1)
    x, y = ctx.ambient().gens
    reference = [Derivation(ctx.ambient(), (x, 0)), Derivation(ctx.ambient(), (0, y))]
    report = Report(command="logder solve Q[x,y]/(x*y) --deg 1", result=basis)
    report.add(check("dimension 2", len(basis) == 2, str(len(basis))))
    report.add(check("span equals {x*dx, y*dy}", same_span(basis, reference)))
    return report


def cone_solver(samples, seed, truncation):
    cone = nilpotent_cone()
    ctx = cone.ring.quotient("x^2 + 4*y*z")
    report = log_derivation_report(ctx, 1, cone.generators, "Hamiltonian fields")
    basis = report.result
    report.add(check("dimension 4", len(basis) == 4, str(len(basis))))
    report.add(check("euler field solves", span_contains(basis, euler_field(ctx.ambient()))))
    report.add(check("discrepancy reported", any(n.startswith("discrepancy") for n in report.notes)))
    return report


def fiber_ranks(samples, seed, truncation):
    report = Report(command="fiber ranks")
    cone = nilpotent_cone()
    crossing = normal_crossing_quotient()
    expected = [
        (cone, (0, 0, 0), 3),
        (cone, (0, 1, 0), 2),
        (crossing, (0, 0), 2),
        (crossing, (1, 0), 1),
    ]
    for pres, point, rank in expected:
        value = fiber_rank(pres, pres.syzygies, point)
        report.add(check(f"{pres.label} at {point} = {rank}", value == rank, str(value)))
    return report


def pbw_round_trip(samples, seed, truncation):
    rng = make_rng(seed)
    report = Report(command=f"pbw round trip --samples {samples}")
    for pres in (weyl_a1(), normal_crossing_ambient()):
        failures = {"symbol of symmetrization": None, "confluence": None}
        for _ in range(samples):
            k = rng.randint(0, 4)
            t = random_tensor(pres, rng, k, coeff_degree=3)
            if failures["symbol of symmetrization"] is None and symbol(symmetrize(t), k) != t:
                failures["symbol of symmetrization"] = str(t)
            u, v, w = (random_element(pres, rng, max_length=2) for _ in range(3))
            if failures["confluence"] is None and multiply(multiply(u, v), w) != multiply(u, multiply(v, w)):
                failures["confluence"] = f"{format_element(u)}; {format_element(v)}; {format_element(w)}"
        for name, witness in failures.items():
            report.add(check(f"{pres.label}: {name}", witness is None, witness))
    return report


def oracle_soundness(samples, seed, truncation):
    rng = make_rng(seed)
    report = Report(command=f"operator oracle --trunc {truncation}")
    pres = weyl_a1()
    witness = None
    for _ in range(samples):
        u = random_element(pres, rng)
        v = random_element(pres, rng)
        p = random_poly(pres.ring, rng, 3)
        left = evaluate_operator(multiply(u, v), p, truncation)
        right = evaluate_operator(u, evaluate_operator(v, p, truncation), truncation)
        if left != right and witness is None:
            witness = f"u={format_element(u)}, v={format_element(v)}, p={format_poly(p)}"
    report.add(check("(u*v)(p) = u(v(p))", witness is None, witness))

    cone = nilpotent_cone()
    x, y, z = cone.ring.gens
    relation = UElement(cone, {(0,): x, (1,): 2 * z, (2,): 2 * y})
    witness = None
    for _ in range(min(50, samples)):
        p = random_poly(cone.ring, rng, 4)
        value = evaluate_operator(relation, p, truncation)
        if value and witness is None:
            witness = f"p={format_poly(p)}: {format_poly(value)}"
    report.add(check("syzygy element is the zero operator", witness is None, witness))
    return report


def bialgebra_axioms(samples, seed, truncation):
    report = counit_axioms_check(weyl_a1(), samples, seed, max_length=3)
    extra = re_axioms_check(weyl_a1().ring, min(50, samples), seed)
    report.extend(Check(f"R^e {c.name}", c.status, c.witness, c.detail) for c in extra.checks)
    return report


def filtration_coincidence(samples, seed, truncation):
    rng = make_rng(seed)
    pres = weyl_a1()
    report = Report(command="primitive filtration level")
    witness = None
    for _ in range(min(100, samples)):
        u = random_element(pres, rng, max_length=3)
        u = u - UElement.ring_element(pres, counit(u))
        if not u:
            continue
        level = primitive_filtration_level(u, 4)
        if level != filtration_degree(u) and witness is None:
            witness = f"{format_element(u)}: level {level}, degree {filtration_degree(u)}"
    report.add(check("level = filtration degree", witness is None, witness))
    return report


def desk_primitives(samples, seed, truncation):
    report = Report(command="hopf solve-primitives")
    for pres, degree, length, dim in ((weyl_a1(), 2, 2, 3), (normal_crossing_ambient(), 1, 2, 6)):
        basis = solve_primitives(pres, degree, length)
        report.add(check(f"{pres.label} d={degree} n={length}: dimension {dim}", len(basis) == dim, str(len(basis))))
        report.add(check(
            f"{pres.label}: word length 1",
            all(filtration_degree(u) == 1 and all(len(w) == 1 for w in u.terms) for u in basis),
        ))
    return report


def jet_duality(samples, seed, truncation):
    pres = weyl_a1()
    report = jet_basis_check(pres, 3)
    delta = dual_basis_jet(pres, (0,), 3)
    square = jet_multiply(delta, delta)
    report.add(check("(dD * dD)(D^2) = 2", square((0, 0)) == pres.ring.coerce(2), format_poly(square((0, 0)))))
    report.add(check("epsilon neutral on dD", jet_multiply(epsilon_jet(pres, 3), delta) == delta))
    return report


def sheaf_lemmas(samples, seed, truncation):
    report = randomized_lemma_suite(fixtures=min(100, samples), seed=seed)
    F = empty_set_fixture()
    sharp = sheafify(F)
    report.add(check("F(empty) = Q is not a sheaf", not is_sheaf(F)))
    report.add(check("sheafify repairs F(empty)", is_sheaf(sharp) and sharp.dims[frozenset()] == 0))
    fixed = check_lemma_stalkwise_to_sheaf(lemma1_fixture())
    report.add(Check("V-poset projection: lemma1", fixed.status, None, "stalkwise isomorphism, not an isomorphism on the whole space"))
    return report


def tensor_claim(samples, seed, truncation):
    return normal_crossing_claim(normal_crossing_quotient(), truncation)


ITEMS = (
    ("nilpotent-cone identities", cone_identities),
    ("normal-crossing log solver", normal_crossing_solver),
    ("nilpotent-cone log solver", cone_solver),
    ("fiber ranks", fiber_ranks),
    ("PBW round trip", pbw_round_trip),
    ("operator-oracle soundness", oracle_soundness),
    ("bialgebra axioms", bialgebra_axioms),
    ("filtration coincidence", filtration_coincidence),
    ("desk-scale primitives", desk_primitives),
    ("jet duality", jet_duality),
    ("sheaf lemmas", sheaf_lemmas),
    ("normal-crossing tensor claim", tensor_claim),
)


def run_suite(samples=None, seed=None, truncation=None, jobs=None, only=None):
    """
    Run the items (all, or the 1-based numbers in ``only``); with more than one
    job the items run on a thread pool, the report keeps item order.
    """
    samples = setting("RINEHART_SUITE_SAMPLES", samples)
    seed = setting("RINEHART_SEED", seed)
    truncation = setting("RINEHART_TRUNCATION", truncation)
    jobs = setting("RINEHART_SUITE_JOBS", jobs)
    selected = [(n, title, fn) for n, (title, fn) in enumerate(ITEMS, start=1) if not only or n in only]

    def run_item(entry):
        n, title, fn = entry
        logger.debug(f"suite item {n}: {title}")
        return fn(samples, seed, truncation)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_item, selected))
    else:
        reports = [run_item(entry) for entry in selected]

    suite = Report(command="paper-suite", result=reports)
    for (n, title, _), item in zip(selected, reports):
        witness = _first_failure(c.witness for c in item.failed_checks)
        detail = "; ".join(f"{c.name}: {c.detail}" for c in item.checks if c.detail and c.status != PASS)
        suite.add(Check(f"{n}. {title}", item.status, witness, detail))
    return suite
