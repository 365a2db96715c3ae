from django.test import SimpleTestCase

from rinehart.exceptions import ContextMismatch, IndexOutOfRange, ModulusRequired, UserError
from rinehart.polyring import (
    MonomialOrder,
    RingCtx,
    division,
    format_poly,
    ideal_member,
    partial,
    random_poly,
    reduce,
    standard_monomials,
    total_degree,
)
from rinehart.utils import make_rng


class ReduceTests(SimpleTestCase):
    def setUp(self):
        self.crossing = RingCtx(("x", "y"), "x*y")
        self.cone = RingCtx(("x", "y", "z"), "x^2 + 4*y*z")

    def test_modulus_reduces_to_zero(self):
        self.assertFalse(reduce(self.crossing.parse("x*y"), self.crossing))
        self.assertFalse(reduce(self.cone.parse("x^2 + 4*y*z"), self.cone))

    def test_hand_division(self):
        p = self.crossing.parse("x^2*y + x^2 + y")
        self.assertEqual(reduce(p, self.crossing), self.crossing.parse("x^2 + y"))

    def test_division_recombines(self):
        p = self.crossing.parse("x^3*y^2 + 2*x + y^3")
        quotient, remainder = division(p, self.crossing)
        self.assertEqual(quotient * self.crossing.modulus + remainder, p)

    def test_no_modulus_is_identity(self):
        ctx = RingCtx(("x",))
        p = ctx.parse("x^3 - 1/2")
        self.assertEqual(reduce(p, ctx), p)
        with self.assertRaises(ModulusRequired):
            division(p, ctx)

    def test_variable_count_mismatch(self):
        other = RingCtx(("x",))
        with self.assertRaises(ContextMismatch):
            reduce(other.parse("x"), self.crossing)

    def test_order_changes_representative_not_class(self):
        lex = self.cone.with_order(MonomialOrder("lex"))
        p = lex.parse("y*z")
        self.assertTrue(ideal_member(lex.parse("x^2") - reduce(lex.parse("x^2"), lex), lex))
        self.assertEqual(reduce(p, lex), p)


class IdealMemberTests(SimpleTestCase):
    def test_membership(self):
        ctx = RingCtx(("x", "y"), "x*y")
        self.assertTrue(ideal_member(ctx.parse("x^2*y"), ctx))
        self.assertFalse(ideal_member(ctx.parse("y"), ctx))
        self.assertTrue(ideal_member(ctx.zero, ctx))

    def test_needs_modulus(self):
        ctx = RingCtx(("x", "y"))
        with self.assertRaises(ModulusRequired):
            ideal_member(ctx.parse("x"), ctx)


class PartialTests(SimpleTestCase):
    def test_partials(self):
        ctx = RingCtx(("x", "y", "z"))
        self.assertEqual(partial(ctx.parse("x^2 + 4*y*z"), 0), ctx.parse("2*x"))
        self.assertEqual(partial(ctx.parse("x*y"), 1), ctx.parse("x"))
        self.assertFalse(partial(ctx.parse("7/3"), 2))

    def test_product_rule(self):
        ctx = RingCtx(("x", "y"))
        p, q = ctx.parse("x^2*y + y"), ctx.parse("x - 3*y^2")
        self.assertEqual(partial(p * q, 1), partial(p, 1) * q + p * partial(q, 1))

    def test_index_out_of_range(self):
        ctx = RingCtx(("x",))
        with self.assertRaises(IndexOutOfRange):
            partial(ctx.parse("x"), 1)


class ContextTests(SimpleTestCase):
    def test_constant_modulus_rejected(self):
        with self.assertRaises(UserError):
            RingCtx(("x",), "3")

    def test_duplicate_variables_rejected(self):
        with self.assertRaises(UserError):
            RingCtx(("x", "x"))

    def test_unknown_order_rejected(self):
        with self.assertRaises(UserError):
            MonomialOrder("revlex")

    def test_str(self):
        self.assertEqual(str(RingCtx(("x", "y"), "x*y")), "Q[x,y]/(x*y)")

    def test_standard_monomials(self):
        ctx = RingCtx(("x", "y"), "x*y")
        self.assertEqual(standard_monomials(ctx, 2), [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)])

    def test_total_degree(self):
        ctx = RingCtx(("x", "y"))
        self.assertEqual(total_degree(ctx.parse("x^2*y + y")), 3)
        self.assertEqual(total_degree(ctx.zero), -1)

    def test_format_poly(self):
        ctx = RingCtx(("x", "y"))
        self.assertEqual(format_poly(ctx.parse("x^2 - 3/2*x*y + 1")), "x^2 - 3/2*x*y + 1")
        self.assertEqual(format_poly(ctx.zero), "0")


class RandomPolynomialTests(SimpleTestCase):
    def setUp(self):
        self.contexts = (RingCtx(("x", "y"), "x*y"), RingCtx(("x", "y", "z"), "x^2 + 4*y*z"))

    def test_reduce_respects_sums_and_products(self):
        rng = make_rng(13)
        for ctx in self.contexts:
            ambient = ctx.ambient()
            for _ in range(10):
                p, q = random_poly(ambient, rng, 4), random_poly(ambient, rng, 4)
                with self.subTest(ctx=str(ctx.modulus), p=str(p), q=str(q)):
                    self.assertEqual(reduce(p + q, ctx), reduce(reduce(p, ctx) + reduce(q, ctx), ctx))
                    self.assertEqual(reduce(p * q, ctx), reduce(reduce(p, ctx) * reduce(q, ctx), ctx))

    def test_partials_commute(self):
        rng = make_rng(17)
        ambient = RingCtx(("x", "y", "z"))
        for _ in range(10):
            p = random_poly(ambient, rng, 5, terms=4)
            for i in range(3):
                for j in range(i + 1, 3):
                    with self.subTest(p=str(p), i=i, j=j):
                        self.assertEqual(partial(partial(p, i), j), partial(partial(p, j), i))
