from django.test import SimpleTestCase

from rinehart.bialgebra import YES
from rinehart.derivation import weyl_a1
from rinehart.enveloping import format_element
from rinehart.exceptions import DuplicateName, LengthMismatch, UnknownIdentifier, UserError
from rinehart.grammar import parse
from rinehart.reports import PASS
from rinehart.session import load, run_command, run_session

CROSSING = """\
ring R = Q[x,y] / (x*y);
der a = x*dx;
der b = y*dy;
bracket [a,b] = 0;
syz (y, 0);
syz (0, x);
el u = b*a + 2*a;
nf u;
verify;
fiber 0 0;
fiber 1 0;
primitive a;
counit (x*a + 3*y);
"""


class LoadTests(SimpleTestCase):
    def test_workspace(self):
        ws = load(CROSSING)
        self.assertEqual(ws.ring_name, "R")
        self.assertEqual(list(ws.derivations), ["a", "b"])
        self.assertEqual(len(ws.syzygies), 2)
        self.assertEqual(len(ws.commands), 6)
        self.assertFalse(ws.presentation.is_free)
        self.assertEqual(format_element(ws.elements["u"]), "a*b + 2*a")

    def test_order_override(self):
        ws = load(CROSSING, order="lex")
        self.assertEqual(ws.ring.order.kind, "lex")

    def test_builtin_preset(self):
        ws = load("el u = D*x;\nnf u;\n", builtin=weyl_a1())
        self.assertEqual(format_element(ws.elements["u"]), "x*D + 1")

    def test_ring_first(self):
        with self.assertRaises(UserError):
            load("der a = x*dx;\n")

    def test_duplicates(self):
        with self.assertRaises(DuplicateName):
            load("ring R = Q[x];\nring S = Q[y];\n")
        with self.assertRaises(DuplicateName):
            load("ring R = Q[x];\nder x = dx;\n")
        with self.assertRaises(DuplicateName):
            load("ring R = Q[x,y];\nder a = dx;\nder b = dy;\nbracket [a,b] = 0;\nbracket [b,a] = 0;\n")

    def test_declarations_precede_commands(self):
        with self.assertRaises(UserError):
            load("ring R = Q[x];\nder a = dx;\nverify;\nder b = x*dx;\n")

    def test_syzygy_length(self):
        with self.assertRaises(LengthMismatch):
            load("ring R = Q[x,y]/(x*y);\nder a = x*dx;\nder b = y*dy;\nsyz (y);\n")

    def test_products_of_derivations_rejected(self):
        with self.assertRaises(UserError):
            load("ring R = Q[x,y];\nder a = dx*dy;\n")

    def test_unknown_identifier_position(self):
        with self.assertRaises(UnknownIdentifier) as raised:
            load("ring R = Q[x];\nder a = dx;\nel u = a*w;\n")
        self.assertIn("line 3, column 10", str(raised.exception))


class CommandTests(SimpleTestCase):
    def test_session_reports(self):
        ws = load(CROSSING)
        reports = run_session(ws)
        self.assertEqual([r.status for r in reports], [PASS] * 6)
        nf, verify, fiber0, fiber1, primitive, counit = reports
        self.assertEqual(format_element(nf.result), "a*b + 2*a")
        self.assertEqual(verify.command, "verify;")
        self.assertEqual(fiber0.result, 2)
        self.assertEqual(fiber1.result, 1)
        self.assertEqual(primitive.result, YES)
        self.assertEqual(counit.result, ws.ring.parse("3*y"))

    def test_inline_command(self):
        ws = load("el u = D^2;\n", builtin=weyl_a1())
        text = "level u 4;"
        report = run_command(ws, parse(text).statements[0], source=text)
        self.assertEqual(report.result, 2)
        self.assertEqual(report.notes, ["filtration degree 2"])

    def test_argument_count(self):
        ws = load("", builtin=weyl_a1())
        with self.assertRaises(UserError):
            run_command(ws, parse("mult D;").statements[0])

    def test_eval(self):
        ws = load("", builtin=weyl_a1())
        report = run_command(ws, parse("eval (D*D*x) (x^3);").statements[0])
        self.assertEqual(report.result, ws.ring.parse("12*x^2"))


class DeclaredSessionTests(SimpleTestCase):
    def test_weyl_session_from_declarations(self):
        ws = load("ring W = Q[x];\nder D = dx;\nel u = D*x;\nnf u;\n")
        self.assertTrue(ws.presentation.is_free)
        (report,) = run_session(ws)
        self.assertEqual(format_element(report.result), "x*D + 1")

    def test_modulus_reaches_the_ring(self):
        ws = load(CROSSING)
        self.assertEqual(ws.ring.modulus, ws.ring.parse("x*y"))

    def test_negative_fiber_point(self):
        ws = load(CROSSING)
        report = run_command(ws, parse("fiber -1 0;").statements[0])
        self.assertEqual(report.result, 1)
        report = run_command(ws, parse("fiber 0 -2;").statements[0])
        self.assertEqual(report.result, 1)
