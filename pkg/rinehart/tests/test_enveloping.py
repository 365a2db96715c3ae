from django.test import SimpleTestCase

from rinehart.derivation import (
    nilpotent_cone,
    nilpotent_cone_quotient,
    normal_crossing_ambient,
    normal_crossing_quotient,
    weyl_a1,
)
from rinehart.enveloping import (
    STensor,
    UElement,
    act,
    commutator,
    counit,
    elements_equal,
    evaluate_operator,
    filtration_degree,
    format_element,
    multiply,
    normal_form,
    operator_equal,
    push_to_quotient,
    random_element,
    random_tensor,
    split_degree_one,
    symbol,
    symmetrize,
)
from rinehart.exceptions import DegreeExceeded, GeneratorMismatch, PresentationMismatch, TruncationExceeded
from rinehart.polyring import random_poly
from rinehart.session import from_presentation, load
from rinehart.utils import make_rng


def elements(pres):
    ws = from_presentation(pres)
    return ws.element


class NormalFormTests(SimpleTestCase):
    def setUp(self):
        self.weyl = weyl_a1()
        self.el = elements(self.weyl)

    def test_weyl_commutation(self):
        self.assertEqual(format_element(self.el("D*x")), "x*D + 1")
        self.assertEqual(format_element(self.el("D*D*x")), "x*D^2 + 2*D")

    def test_normal_crossing_generator_past_variable(self):
        el = elements(normal_crossing_ambient())
        self.assertEqual(el("a*x"), el("x*a + x"))

    def test_words_come_out_sorted(self):
        cone = nilpotent_cone()
        u = elements(cone)("Dz*Dy*Dx")
        self.assertTrue(all(list(w) == sorted(w) for w in u.terms))

    def test_input_order_does_not_matter(self):
        pres = normal_crossing_ambient()
        x = pres.ring.gens[0]
        raw = [(x, (1, 0)), (1, (0,)), (x, (0, 1))]
        self.assertEqual(normal_form(raw, pres), normal_form(list(reversed(raw)), pres))

    def test_quotient_coefficient_reduction(self):
        pres = normal_crossing_quotient()
        el = elements(pres)
        bx = el("b*x")
        self.assertEqual(bx, el("x*b"))
        self.assertTrue(operator_equal(bx, UElement.zero(pres)).equal)


class MultiplyTests(SimpleTestCase):
    def test_noncommutativity_witness(self):
        pres = weyl_a1()
        el = elements(pres)
        self.assertEqual(multiply(el("x"), el("D")), el("x*D"))
        self.assertEqual(multiply(el("D"), el("x")), el("x*D") + UElement.one(pres))

    def test_unit(self):
        pres = nilpotent_cone()
        u = random_element(pres, make_rng(1))
        one = UElement.one(pres)
        self.assertEqual(multiply(u, one), u)
        self.assertEqual(multiply(one, u), u)

    def test_associative_on_free_presentations(self):
        for pres in (weyl_a1(), normal_crossing_ambient()):
            rng = make_rng(7)
            for _ in range(5):
                u, v, w = (random_element(pres, rng) for _ in range(3))
                with self.subTest(pres=str(pres)):
                    self.assertEqual(multiply(u, multiply(v, w)), multiply(multiply(u, v), w))

    def test_filtration_degree_is_subadditive(self):
        pres = nilpotent_cone()
        rng = make_rng(11)
        for _ in range(5):
            u, v = random_element(pres, rng), random_element(pres, rng)
            self.assertLessEqual(filtration_degree(multiply(u, v)), filtration_degree(u) + filtration_degree(v))

    def test_presentation_mismatch(self):
        with self.assertRaises(PresentationMismatch):
            multiply(UElement.one(weyl_a1()), UElement.one(normal_crossing_ambient()))


class SymbolTests(SimpleTestCase):
    def test_symbol_and_counit(self):
        pres = weyl_a1()
        el = elements(pres)
        u = el("x*D^2 + 2*D + 5*x")
        self.assertEqual(filtration_degree(el("x*D^2 + 2*D")), 2)
        self.assertEqual(symbol(u, 2), STensor(pres, {(0, 0): pres.ring.parse("x")}))
        self.assertEqual(counit(u), pres.ring.parse("5*x"))
        self.assertEqual(counit(el("x^2")), pres.ring.parse("x^2"))
        with self.assertRaises(DegreeExceeded):
            symbol(u, 1)

    def test_symmetrize_in_cone(self):
        pres = nilpotent_cone()
        el = elements(pres)
        self.assertEqual(symmetrize(STensor(pres, {(0, 1): 1})), el("Dx*Dy - Dy"))
        self.assertEqual(symmetrize(STensor(pres, {(0,): 1})), el("Dx"))

    def test_pbw_round_trip(self):
        for pres in (weyl_a1(), normal_crossing_ambient()):
            rng = make_rng(5)
            for degree in range(1, 4):
                t = random_tensor(pres, rng, degree)
                with self.subTest(pres=str(pres), degree=degree):
                    self.assertEqual(symbol(symmetrize(t), degree), t)

    def test_split_degree_one(self):
        pres = normal_crossing_ambient()
        ring_part, coeffs = split_degree_one(elements(pres)("y*a + 3 + x*b"))
        self.assertEqual(ring_part, pres.ring.parse("3"))
        self.assertEqual(coeffs, (pres.ring.parse("y"), pres.ring.parse("x")))


class OperatorTests(SimpleTestCase):
    def test_weyl_action(self):
        pres = weyl_a1()
        el = elements(pres)
        self.assertEqual(evaluate_operator(el("D*x"), pres.ring.one), pres.ring.one)
        self.assertEqual(act(el("D^2"), pres.ring.parse("x^3")), pres.ring.parse("6*x"))

    def test_composition_is_sound(self):
        pres = nilpotent_cone()
        rng = make_rng(13)
        p = pres.ring.parse("x^2*y - z + 3")
        for _ in range(5):
            u, v = random_element(pres, rng), random_element(pres, rng)
            self.assertEqual(
                evaluate_operator(multiply(u, v), p, 30),
                evaluate_operator(u, evaluate_operator(v, p, 30), 30),
            )

    def test_cone_syzygy_acts_as_zero(self):
        pres = nilpotent_cone()
        relation = elements(pres)("x*Dx + 2*z*Dy + 2*y*Dz")
        self.assertTrue(relation)
        self.assertTrue(operator_equal(relation, UElement.zero(pres), 6).equal)

    def test_composed_crossing_operator_vanishes_on_quotient(self):
        pres = normal_crossing_quotient()
        ab = elements(pres)("a*b")
        for text in ("1", "x", "x^4", "y^3"):
            self.assertFalse(evaluate_operator(ab, pres.ring.parse(text)))

    def test_truncation(self):
        pres = weyl_a1()
        with self.assertRaises(TruncationExceeded):
            evaluate_operator(UElement.one(pres), pres.ring.parse("x^5"), 3)

    def test_equality_falls_back_on_non_free(self):
        pres = normal_crossing_quotient()
        el = elements(pres)
        comparison = elements_equal(el("x*b"), UElement.zero(pres), 5)
        self.assertTrue(comparison.equal)
        self.assertEqual(comparison.status, "equal up to degree 5")
        self.assertFalse(elements_equal(el("a"), el("b"), 5).equal)


class QuotientMapTests(SimpleTestCase):
    def test_cone_relation_pushes_to_zero_operator(self):
        source, target = nilpotent_cone(), nilpotent_cone_quotient()
        image = push_to_quotient(elements(source)("x*Dx + 2*z*Dy + 2*y*Dz"), target)
        self.assertTrue(operator_equal(image, UElement.zero(target), 5).equal)
        self.assertEqual(push_to_quotient(UElement.one(source), target), UElement.one(target))

    def test_coefficients_are_reduced(self):
        source, target = nilpotent_cone(), nilpotent_cone_quotient()
        image = push_to_quotient(elements(source)("x^2*Dy"), target)
        self.assertEqual(image, elements(target)("-4*y*z*Dy"))

    def test_generator_mismatch(self):
        with self.assertRaises(GeneratorMismatch):
            push_to_quotient(UElement.one(weyl_a1()), nilpotent_cone_quotient())


AFFINE = "ring R = Q[x,y];\nder a = dx;\nder b = x*dx + dy;\nbracket [a,b] = a;\n"


def free_presentations():
    return (weyl_a1(), normal_crossing_ambient(), load(AFFINE).presentation)


class RandomElementTests(SimpleTestCase):
    def test_commutator_lowers_degree(self):
        rng = make_rng(29)
        for pres in free_presentations():
            for _ in range(8):
                u, v = random_element(pres, rng), random_element(pres, rng)
                c = commutator(u, v)
                if not c:
                    continue
                with self.subTest(pres=str(pres), u=format_element(u), v=format_element(v)):
                    self.assertLessEqual(filtration_degree(c), filtration_degree(u) + filtration_degree(v) - 1)

    def test_normal_form_ignores_term_order(self):
        rng = make_rng(31)
        for pres in free_presentations():
            for _ in range(5):
                raw = [(random_poly(pres.ring, rng, 2, terms=2), tuple(rng.randrange(pres.size) for _ in range(rng.randint(0, 4))))
                       for _ in range(4)]
                expected = normal_form(raw, pres)
                shuffled = list(raw)
                rng.shuffle(shuffled)
                termwise = UElement.zero(pres)
                for term in raw:
                    termwise = termwise + normal_form([term], pres)
                with self.subTest(pres=str(pres), raw=str(raw)):
                    self.assertEqual(normal_form(shuffled, pres), expected)
                    self.assertEqual(termwise, expected)

    def test_normal_form_ignores_grouping(self):
        rng = make_rng(37)
        for pres in free_presentations():
            for _ in range(5):
                c = random_poly(pres.ring, rng, 2, terms=2)
                word = tuple(rng.randrange(pres.size) for _ in range(rng.randint(1, 5)))
                cut = rng.randint(0, len(word))
                left = normal_form([(c, word[:cut])], pres)
                right = normal_form([(pres.ring.one, word[cut:])], pres)
                with self.subTest(pres=str(pres), word=word, cut=cut):
                    self.assertEqual(multiply(left, right), normal_form([(c, word)], pres))

    def test_associative_with_lower_terms(self):
        pres = load(AFFINE).presentation
        rng = make_rng(41)
        for _ in range(5):
            u, v, w = (random_element(pres, rng) for _ in range(3))
            with self.subTest(u=format_element(u)):
                self.assertEqual(multiply(u, multiply(v, w)), multiply(multiply(u, v), w))
