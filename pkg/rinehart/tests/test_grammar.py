from fractions import Fraction

from django.test import SimpleTestCase

from rinehart.exceptions import ParseError, UnknownIdentifier
from rinehart.grammar import (
    Add,
    Command,
    Commutator,
    DerDecl,
    Mul,
    Name,
    Num,
    Pow,
    RingDecl,
    parse,
    parse_expression,
    parse_poly,
    render,
    render_expr,
)
from rinehart.polyring import RingCtx

SESSION = """\
# normal crossing
ring R = Q[x,y] / (x*y) order grevlex;
der a = x*dx;
der b = y*dy;
bracket [a,b] = 0;
syz (y, 0);
el u = [a, b] + 2x^2*a - 1/2;
nf u;
symbol u 1;
"""


class ExpressionTests(SimpleTestCase):
    def test_structure(self):
        node = parse_expression("2x^2 - 3/4*y")
        expected = Add((
            ("+", Mul((Num(Fraction(2)), Pow(Name("x"), 2)))),
            ("-", Mul((Num(Fraction(3, 4)), Name("y")))),
        ))
        self.assertEqual(node, expected)

    def test_lone_positive_term_is_not_wrapped(self):
        self.assertEqual(parse_expression("x"), Name("x"))
        self.assertEqual(parse_expression("-x"), Add((("-", Name("x")),)))

    def test_commutator(self):
        node = parse_expression("[a, b*x]")
        self.assertIsInstance(node, Commutator)
        self.assertEqual(render_expr(node), "[a, b*x]")

    def test_render_round_trip(self):
        for text in ("-x + y", "2*x^2 - 3/4*y", "(x + 1)^3*[a, b]", "x*(y - z)"):
            with self.subTest(text=text):
                node = parse_expression(text)
                self.assertEqual(parse_expression(render_expr(node)), node)

    def test_parse_poly(self):
        ctx = RingCtx(("x", "y"))
        x, y = ctx.gens
        self.assertEqual(parse_poly("(x + y)^2 - 2x*y", ctx), x**2 + y**2)

    def test_unknown_identifier(self):
        ctx = RingCtx(("x",))
        with self.assertRaises(UnknownIdentifier) as raised:
            parse_poly("x + w", ctx)
        self.assertIn("column 5", str(raised.exception))


class SessionParseTests(SimpleTestCase):
    def test_statements(self):
        session = parse(SESSION)
        ring = session.statements[0]
        self.assertIsInstance(ring, RingDecl)
        self.assertEqual(ring.variables, ("x", "y"))
        self.assertEqual(ring.order, "grevlex")
        self.assertEqual(len(session.declarations(DerDecl)), 2)
        self.assertEqual(session.statements[-1], Command("symbol", (Name("u"), Num(Fraction(1)))))

    def test_comments_are_ignored(self):
        self.assertEqual(parse("# nothing\n").statements, ())

    def test_render_round_trip(self):
        session = parse(SESSION)
        self.assertEqual(parse(render(session)), session)

    def test_positions(self):
        session = parse(SESSION)
        self.assertEqual(session.position(session.statements[1].loc), (3, 1))

    def test_syntax_error_location(self):
        with self.assertRaises(ParseError) as raised:
            parse("ring R = Q[x];\nder a = x*;\n")
        self.assertEqual(raised.exception.line, 2)
        self.assertIn("line 2", str(raised.exception))

    def test_reserved_word_rejected(self):
        with self.assertRaises(ParseError):
            parse("ring R = Q[x];\nel ring = x;\n")

    def test_unknown_command(self):
        with self.assertRaises(ParseError):
            parse("ring R = Q[x];\nfrobnicate x;\n")

    def test_deep_nesting(self):
        with self.assertRaises(ParseError):
            parse_expression("(" * 5000 + "x" + ")" * 5000)


class DeclarationNodeTests(SimpleTestCase):
    def test_declarations_hold_expression_nodes(self):
        ring, der_a, _, bracket, _, el = parse(SESSION).statements[:6]
        self.assertEqual(ring.modulus, Mul((Name("x"), Name("y"))))
        self.assertEqual(der_a.expr, Mul((Name("x"), Name("dx"))))
        self.assertEqual(bracket.expr, Num(Fraction(0)))
        self.assertIsInstance(el.expr, Add)

    def test_ring_without_modulus(self):
        ring = parse("ring W = Q[x];\n").statements[0]
        self.assertIsNone(ring.modulus)
        self.assertIsNone(ring.order)

    def test_zero_denominator(self):
        for text in ("nf 1/0;", "ring R = Q[x];\nel u = 3/0*x;\n"):
            with self.subTest(text=text):
                with self.assertRaises(ParseError) as raised:
                    parse(text)
                self.assertIn("zero denominator", str(raised.exception))
        with self.assertRaises(ParseError):
            parse_expression("x + 1/0")

    def test_signed_command_arguments(self):
        command = parse("fiber -1 +2;").statements[0]
        self.assertEqual(command.args, (Add((("-", Num(Fraction(1))),)), Num(Fraction(2))))
        self.assertEqual(render(parse("fiber -1 0;")), "fiber -1 0;\n")
