from django.test import SimpleTestCase
from sympy import Matrix, eye

from rinehart.exceptions import FixtureError, UnknownPoint
from rinehart.reports import FAIL, HYPOTHESIS_VIOLATED, PASS
from rinehart.serializers import PresheafSerializer, load_morphism, load_presheaf
from rinehart.sheafkit import (
    FinitePoset,
    antichain,
    chain,
    chain_stalk_fixture,
    check_lemma_local_to_stalkwise,
    check_lemma_stalkwise_to_sheaf,
    constant_presheaf,
    empty_set_fixture,
    gluing_fixture,
    identity_morphism,
    is_functorial,
    is_sheaf,
    lemma1_fixture,
    minimal_cover,
    random_lemma2_fixture,
    random_sheaf,
    randomized_lemma_suite,
    sheaf_check,
    sheafify,
    stalk,
    universal_property_check,
    unit_map,
    v_poset,
    zero_morphism,
)
from rinehart.utils import make_rng

GLUING_JSON = {
    "poset": {"name": "two-points", "elements": ["x", "y"], "relations": []},
    "sections": [
        {"open": [], "dim": 0},
        {"open": ["x"], "dim": 1},
        {"open": ["y"], "dim": 1},
        {"open": ["x", "y"], "dim": 1},
    ],
    "restrictions": [
        {"source": ["x", "y"], "target": ["x"], "matrix": {"shape": [1, 1], "rows": [["1"]]}},
        {"source": ["x", "y"], "target": ["y"], "matrix": {"shape": [1, 1], "rows": [["1"]]}},
        {"source": ["x", "y"], "target": [], "matrix": {"shape": [0, 1], "rows": []}},
        {"source": ["x"], "target": [], "matrix": {"shape": [0, 1], "rows": []}},
        {"source": ["y"], "target": [], "matrix": {"shape": [0, 1], "rows": []}},
    ],
}


class PosetTests(SimpleTestCase):
    def test_opens_are_up_sets(self):
        poset = v_poset()
        self.assertEqual(len(poset.opens), 5)
        self.assertIn(frozenset({"x", "z"}), poset.opens)
        self.assertNotIn(frozenset({"x"}), poset.opens)
        self.assertEqual(poset.minimal_open("x"), frozenset({"x", "z"}))

    def test_cycles_rejected(self):
        with self.assertRaises(FixtureError):
            FinitePoset(["a", "b"], [("a", "b"), ("b", "a")])

    def test_unknown_point(self):
        with self.assertRaises(UnknownPoint):
            v_poset().minimal_open("w")

    def test_minimal_cover(self):
        poset = v_poset()
        self.assertEqual(set(minimal_cover(poset)), {frozenset({"x", "z"}), frozenset({"y", "z"})})


class StalkTests(SimpleTestCase):
    def test_one_point_space(self):
        F = constant_presheaf(chain(1), 2)
        self.assertEqual(stalk(F, "p0").dim, 2)

    def test_chain_stalks(self):
        F = chain_stalk_fixture()
        self.assertEqual(stalk(F, "x").dim, 2)
        self.assertEqual(stalk(F, "y").dim, 1)

    def test_constant_stalks(self):
        F = constant_presheaf(v_poset(), 3)
        self.assertTrue(all(stalk(F, x).dim == 3 for x in F.poset.elements))


class SheafifyTests(SimpleTestCase):
    def test_empty_set_repair(self):
        F = empty_set_fixture()
        self.assertFalse(is_sheaf(F))
        self.assertEqual(sheafify(F).dims[frozenset()], 0)

    def test_gluing_creates_sections(self):
        F = gluing_fixture()
        self.assertFalse(is_sheaf(F))
        whole = frozenset(F.poset.elements)
        self.assertEqual(sheafify(F).dims[whole], 2)

    def test_constant_presheaf_on_chain_is_a_sheaf(self):
        self.assertTrue(is_sheaf(constant_presheaf(chain(3), 2)))

    def test_sheaf_is_fixed(self):
        F = random_sheaf(v_poset(), make_rng(2))
        self.assertTrue(is_functorial(F))
        self.assertTrue(is_sheaf(F))
        eta = unit_map(F)
        self.assertTrue(all(eta.maps[U].rank() == F.dims[U] for U in F.poset.opens if F.dims[U]))

    def test_idempotent_and_stalks_preserved(self):
        for F in (empty_set_fixture(), gluing_fixture(), chain_stalk_fixture()):
            with self.subTest(poset=F.poset.name):
                self.assertTrue(is_sheaf(sheafify(F)))
                self.assertEqual(sheaf_check(F).status, PASS)

    def test_universal_property(self):
        F = gluing_fixture()
        self.assertEqual(universal_property_check(unit_map(F)).status, PASS)


class LemmaTests(SimpleTestCase):
    def test_stalkwise_isomorphism_lifts(self):
        psi = lemma1_fixture()
        whole = frozenset(psi.source.poset.elements)
        self.assertEqual(psi.maps[whole].shape, (1, 2))
        self.assertTrue(psi.commutes())
        self.assertEqual(check_lemma_stalkwise_to_sheaf(psi).status, PASS)

    def test_identity_passes_both(self):
        F = constant_presheaf(v_poset(), 2)
        psi = identity_morphism(F)
        self.assertEqual(check_lemma_stalkwise_to_sheaf(psi).status, PASS)
        self.assertEqual(check_lemma_local_to_stalkwise(psi, minimal_cover(F.poset)).status, PASS)

    def test_singular_stalk_violates_hypothesis(self):
        F = constant_presheaf(chain(2), 1)
        report = check_lemma_stalkwise_to_sheaf(zero_morphism(F, F))
        self.assertEqual(report.status, HYPOTHESIS_VIOLATED)
        self.assertNotEqual(report.status, FAIL)

    def test_local_isomorphism_on_two_member_cover(self):
        poset = v_poset()
        psi = random_lemma2_fixture(poset, make_rng(4))
        self.assertEqual(check_lemma_local_to_stalkwise(psi, minimal_cover(poset)).status, PASS)

    def test_cover_must_cover(self):
        psi = identity_morphism(constant_presheaf(v_poset(), 1))
        with self.assertRaises(FixtureError):
            check_lemma_local_to_stalkwise(psi, [frozenset({"z"})])

    def test_randomized_fixtures(self):
        report = randomized_lemma_suite(["chain", "antichain", "V"], fixtures=4, seed=9)
        self.assertEqual(report.status, PASS)
        self.assertEqual(len(report.checks), 12)


class FixtureFormatTests(SimpleTestCase):
    def test_load_gluing_fixture(self):
        F = load_presheaf(GLUING_JSON)
        self.assertTrue(is_functorial(F))
        self.assertEqual(sheafify(F).dims[frozenset({"x", "y"})], 2)

    def test_morphism_fixture(self):
        data = PresheafSerializer(gluing_fixture()).data
        section_data = {"sections": data["sections"], "restrictions": data["restrictions"]}
        identity = {"shape": [1, 1], "rows": [["1"]]}
        fixture = {
            "poset": data["poset"],
            "source": section_data,
            "target": section_data,
            "components": [
                {"open": [], "matrix": {"shape": [0, 0], "rows": []}},
                {"open": ["p0"], "matrix": identity},
                {"open": ["p1"], "matrix": identity},
                {"open": ["p0", "p1"], "matrix": {"shape": [1, 1], "rows": [["2"]]}},
            ],
            "cover": [["p0"], ["p1"]],
        }
        psi, cover = load_morphism(fixture)
        self.assertEqual(psi.maps[frozenset({"p0", "p1"})], Matrix([[2]]))
        self.assertEqual(psi.maps[frozenset({"p0"})], eye(1))
        self.assertEqual(cover, [["p0"], ["p1"]])

    def test_bad_shape_rejected(self):
        data = dict(GLUING_JSON)
        data["restrictions"] = [
            {"source": ["x", "y"], "target": ["x"], "matrix": {"shape": [1, 2], "rows": [["1", "0"]]}},
        ]
        with self.assertRaises(FixtureError):
            load_presheaf(data)

    def test_missing_dimension_rejected(self):
        data = dict(GLUING_JSON)
        data["sections"] = GLUING_JSON["sections"][:2]
        with self.assertRaises(FixtureError):
            load_presheaf(data)
