import json
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from .test_session import CROSSING


def run(*argv):
    out = StringIO()
    call_command("rinehart", *argv, stdout=out)
    return out.getvalue()


def run_json(*argv):
    return json.loads(run(*argv, "--json"))


class PbwCommandTests(SimpleTestCase):
    def test_normal_form(self):
        data = run_json("pbw", "nf", "--preset", "weyl-a1", "--el", "D*D*x")
        self.assertEqual(data["status"], "pass")
        self.assertEqual(data["result"]["text"], "x*D^2 + 2*D")
        self.assertEqual(data["command"], "nf (D*D*x);")
        self.assertNotIn("timing", data)

    def test_timing_on_request(self):
        data = run_json("pbw", "mult", "--preset", "weyl-a1", "--el", "D", "--el", "x", "--timing")
        self.assertEqual(data["result"]["text"], "x*D + 1")
        self.assertIn("timing", data)

    def test_symmetrize(self):
        data = run_json("pbw", "symmetrize", "--preset", "nilpotent-cone", "--el", "Dx*Dy", "--deg", "2")
        self.assertEqual(data["result"]["text"], "Dx*Dy - Dy")

    def test_text_report(self):
        output = run("pbw", "symbol", "--preset", "weyl-a1", "--el", "x*D^2 + 2*D", "--deg", "2")
        self.assertTrue(output.startswith("symbol (x*D^2 + 2*D) 2;: pass"))

    def test_missing_session_is_user_error(self):
        with self.assertRaises(CommandError) as raised:
            run("pbw", "nf", "--el", "D")
        self.assertEqual(raised.exception.returncode, 2)

    def test_syntax_error_is_user_error(self):
        with self.assertRaises(CommandError) as raised:
            run("pbw", "nf", "--preset", "weyl-a1", "--el", "D*")
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("Syntax error", str(raised.exception))

    def test_unknown_action(self):
        with self.assertRaises(CommandError):
            run("pbw", "frobnicate")


class LogderCommandTests(SimpleTestCase):
    def test_solve(self):
        data = run_json("logder", "solve", "--ring", "Q[x,y]/(x*y)", "--deg", "1")
        self.assertEqual(len(data["result"]), 2)

    def test_solve_against_reference(self):
        data = run_json("logder", "solve", "--ring", "Q[x,y,z]/(x^2 + 4*y*z)", "--deg", "1",
                        "--reference", "nilpotent-cone")
        self.assertEqual(len(data["result"]), 4)
        self.assertTrue(any(note.startswith("discrepancy") for note in data["notes"]))

    def test_check_failure_exits_one(self):
        with self.assertRaises(CommandError) as raised:
            run("logder", "check", "--ring", "Q[x,y]/(x*y)", "--der", "x*dx", "--der", "dx")
        self.assertEqual(raised.exception.returncode, 1)


class LrAndHopfCommandTests(SimpleTestCase):
    def test_verify(self):
        output = run("lr", "verify", "--preset", "nilpotent-cone")
        self.assertTrue(output.startswith("lr verify nilpotent-cone: pass"))

    def test_undecided_primitive_exits_zero(self):
        data = run_json("hopf", "primitive", "--preset", "normal-crossing-quotient", "--el", "a*b")
        self.assertEqual(data["status"], "undecided")
        self.assertEqual(data["result"], "undecided-at-truncation")

    def test_coproduct(self):
        data = run_json("hopf", "coproduct", "--preset", "weyl-a1", "--el", "D^2")
        self.assertEqual(data["result"]["arity"], 2)
        self.assertEqual(len(data["result"]["terms"]), 3)

    def test_solve_primitives(self):
        data = run_json("hopf", "solve-primitives", "--preset", "weyl-a1", "--deg", "2", "--length", "2")
        self.assertEqual(len(data["result"]), 3)

    def test_level(self):
        data = run_json("hopf", "level", "--preset", "weyl-a1", "--el", "D^3")
        self.assertEqual(data["result"], 3)

    def test_claim(self):
        data = run_json("hopf", "claim", "--trunc", "6")
        self.assertEqual(data["status"], "undecided")


class SheafCommandTests(SimpleTestCase):
    def test_builtin_check(self):
        data = run_json("sheaf", "check", "--builtin", "gluing")
        self.assertEqual(data["status"], "pass")
        self.assertEqual(data["result"]["{p0,p1}"], 2)

    def test_lemma_fixture(self):
        self.assertEqual(run_json("sheaf", "lemma1", "--builtin", "lemma1")["status"], "pass")

    def test_random_lemmas(self):
        data = run_json("sheaf", "lemma2", "--random", "2", "--shape", "V", "--seed", "5")
        self.assertEqual(data["status"], "pass")

    def test_fixture_file(self):
        fixture = run_json("sheaf", "fixture", "--builtin", "chain-stalk")["result"]
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(fixture, fh)
        self.addCleanup(os.remove, fh.name)
        data = run_json("sheaf", "check", "--fixture", fh.name)
        self.assertEqual(data["result"]["{x,y}"], 2)

    def test_unknown_builtin(self):
        with self.assertRaises(CommandError) as raised:
            run("sheaf", "check", "--builtin", "moebius")
        self.assertEqual(raised.exception.returncode, 2)


class SessionAndSuiteCommandTests(SimpleTestCase):
    def test_session_file(self):
        with tempfile.NamedTemporaryFile("w", suffix=".lr", delete=False) as fh:
            fh.write(CROSSING)
        self.addCleanup(os.remove, fh.name)
        data = run_json("session", "--session", fh.name)
        self.assertEqual(data["status"], "pass")
        self.assertEqual(len(data["result"]), 6)

    def test_missing_session_file(self):
        with self.assertRaises(CommandError) as raised:
            run("session", "--session", "/nonexistent/session.lr")
        self.assertEqual(raised.exception.returncode, 2)

    def test_suite_item(self):
        data = run_json("paper-suite", "--item", "4", "--samples", "2")
        self.assertEqual(data["checks"][0]["name"], "4. fiber ranks")
        self.assertEqual(data["status"], "pass")


class DeclaredInputCommandTests(SimpleTestCase):
    def test_zero_denominator_is_user_error(self):
        with self.assertRaises(CommandError) as raised:
            run("pbw", "nf", "--preset", "weyl-a1", "--el", "1/0")
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("zero denominator", str(raised.exception))

    def test_declared_session_with_element(self):
        with tempfile.NamedTemporaryFile("w", suffix=".lr", delete=False) as fh:
            fh.write("ring W = Q[x];\nder D = dx;\n")
        self.addCleanup(os.remove, fh.name)
        data = run_json("pbw", "nf", "--session", fh.name, "--el", "D*x")
        self.assertEqual(data["result"]["text"], "x*D + 1")
