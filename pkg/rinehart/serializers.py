# rinehart/serializers.py
from fractions import Fraction

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer
from sympy import Rational
from sympy.matrices import MatrixBase
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement

from .bialgebra import JetElement, UTensor, format_tensor
from .derivation import Derivation, format_derivation
from .enveloping import OperatorComparison, STensor, UElement, format_element
from .exceptions import FixtureError
from .fields import MatrixField, PolyField, RationalField
from .polyring import format_poly
from .reports import Report
from .sheafkit import FinitePoset, PresheafFS, PresheafMorphism


def _words(pres, word):
    return [pres.names[i] for i in word]


def _by_length(keys):
    return sorted(keys, key=lambda w: (-len(w), w))


# ----------------------------
# Algebra values
# ----------------------------
class PolySerializer(serializers.Serializer):
    text = serializers.SerializerMethodField()
    terms = PolyField(source="*")

    def get_text(self, p):
        return format_poly(p)


class DerivationSerializer(serializers.Serializer):
    text = serializers.SerializerMethodField()
    variables = serializers.SerializerMethodField()
    coeffs = serializers.ListField(child=PolyField())

    def get_text(self, D):
        return format_derivation(D)

    def get_variables(self, D):
        return list(D.ctx.variables)


class UElementSerializer(serializers.Serializer):
    text = serializers.SerializerMethodField()
    terms = serializers.SerializerMethodField()

    def get_text(self, u):
        return format_element(u)

    def get_terms(self, u):
        poly = PolyField()
        return [
            {"word": _words(u.pres, w), "coeff": poly.to_representation(u.terms[w])}
            for w in _by_length(u.terms)
        ]


class STensorSerializer(serializers.Serializer):
    text = serializers.SerializerMethodField()
    terms = serializers.SerializerMethodField()

    def get_text(self, t):
        return str(t)

    def get_terms(self, t):
        poly = PolyField()
        return [
            {"multiset": _words(t.pres, k), "coeff": poly.to_representation(t.terms[k])}
            for k in _by_length(t.terms)
        ]


class UTensorSerializer(serializers.Serializer):
    text = serializers.SerializerMethodField()
    arity = serializers.IntegerField()
    terms = serializers.SerializerMethodField()

    def get_text(self, t):
        return format_tensor(t)

    def get_terms(self, t):
        ordered = sorted(t.terms, key=lambda k: tuple((-len(w), w) for w in k))
        return [
            {"left": [_words(t.pres, w) for w in key], "right": UElementSerializer(t.terms[key]).data}
            for key in ordered
        ]


class JetSerializer(serializers.Serializer):
    order = serializers.IntegerField()
    values = serializers.SerializerMethodField()

    def get_values(self, phi):
        poly = PolyField()
        return [
            {"word": _words(phi.pres, w), "value": poly.to_representation(phi.values[w])}
            for w in sorted(phi.values, key=lambda w: (len(w), w))
        ]


# ----------------------------
# Sheaf fixtures
# ----------------------------
class PosetSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, allow_blank=True, default="")
    elements = serializers.ListField(child=serializers.CharField())
    relations = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2),
        required=False,
        default=list,
    )

    def create(self, validated_data):
        return FinitePoset(
            validated_data["elements"],
            [tuple(r) for r in validated_data["relations"]],
            validated_data["name"],
        )

    def to_representation(self, poset):
        return {
            "name": poset.name,
            "elements": [str(x) for x in poset.elements],
            "relations": [[str(a), str(b)] for a, b in poset.relations()],
        }


class SectionDataSerializer(serializers.Serializer):
    sections = serializers.ListField(child=serializers.DictField())
    restrictions = serializers.ListField(child=serializers.DictField(), required=False, default=list)

    def build(self, poset, validated_data):
        matrix = MatrixField()
        try:
            dims = {frozenset(s["open"]): int(s["dim"]) for s in validated_data["sections"]}
            maps = {
                (frozenset(r["source"]), frozenset(r["target"])): matrix.to_internal_value(r["matrix"])
                for r in validated_data["restrictions"]
            }
        except (KeyError, TypeError, ValueError) as e:
            raise FixtureError(f"Malformed section data: {e}")
        except serializers.ValidationError as e:
            raise FixtureError(f"Malformed restriction matrix: {e.detail}")
        return PresheafFS(poset, dims, maps)

    def to_representation(self, F):
        poset = F.poset
        matrix = MatrixField()
        return {
            "sections": [{"open": poset.ordered(U), "dim": F.dims[U]} for U in poset.opens],
            "restrictions": [
                {"source": poset.ordered(U), "target": poset.ordered(V), "matrix": matrix.to_representation(F.res(U, V))}
                for U, V in F.pairs()
                if U != V
            ],
        }


class PresheafSerializer(SectionDataSerializer):
    poset = PosetSerializer()

    def create(self, validated_data):
        poset = PosetSerializer().create(validated_data["poset"])
        return self.build(poset, validated_data)

    def to_representation(self, F):
        data = {"poset": PosetSerializer(F.poset).data}
        data.update(super().to_representation(F))
        return data


class MorphismSerializer(serializers.Serializer):
    poset = PosetSerializer()
    source = SectionDataSerializer()
    target = SectionDataSerializer()
    components = serializers.ListField(child=serializers.DictField())
    cover = serializers.ListField(child=serializers.ListField(child=serializers.CharField()), required=False)

    def create(self, validated_data):
        poset = PosetSerializer().create(validated_data["poset"])
        source = SectionDataSerializer().build(poset, validated_data["source"])
        target = SectionDataSerializer().build(poset, validated_data["target"])
        matrix = MatrixField()
        try:
            maps = {frozenset(c["open"]): matrix.to_internal_value(c["matrix"]) for c in validated_data["components"]}
        except (KeyError, TypeError) as e:
            raise FixtureError(f"Malformed morphism component: {e}")
        except serializers.ValidationError as e:
            raise FixtureError(f"Malformed morphism matrix: {e.detail}")
        cover = validated_data.get("cover")
        return PresheafMorphism(source, target, maps), cover

    def to_representation(self, psi):
        poset = psi.source.poset
        matrix = MatrixField()
        return {
            "poset": PosetSerializer(poset).data,
            "source": SectionDataSerializer(psi.source).data,
            "target": SectionDataSerializer(psi.target).data,
            "components": [{"open": poset.ordered(U), "matrix": matrix.to_representation(psi.maps[U])} for U in poset.opens],
        }


def _load(serializer_class, data):
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise FixtureError(f"Invalid fixture: {serializer.errors}")
    return serializer.save()


def load_presheaf(data):
    return _load(PresheafSerializer, data)


def load_morphism(data):
    """(morphism, cover or None) from fixture JSON."""
    return _load(MorphismSerializer, data)


# ----------------------------
# Reports
# ----------------------------
class ResultField(serializers.Field):
    """Any command result: algebra values, fixtures, nested reports and plain containers."""

    def to_representation(self, value):
        if isinstance(value, Report):
            return ReportSerializer(value).data
        if isinstance(value, UElement):
            return UElementSerializer(value).data
        if isinstance(value, UTensor):
            return UTensorSerializer(value).data
        if isinstance(value, STensor):
            return STensorSerializer(value).data
        if isinstance(value, Derivation):
            return DerivationSerializer(value).data
        if isinstance(value, JetElement):
            return JetSerializer(value).data
        if isinstance(value, PolyElement):
            return PolySerializer(value).data
        if isinstance(value, OperatorComparison):
            return {"status": value.status, "witness": value.witness}
        if isinstance(value, PresheafFS):
            return PresheafSerializer(value).data
        if isinstance(value, PresheafMorphism):
            return MorphismSerializer(value).data
        if isinstance(value, MatrixBase):
            return MatrixField().to_representation(value)
        if isinstance(value, dict):
            return {str(k): self.to_representation(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self.to_representation(v) for v in value]
        if isinstance(value, bool) or value is None:
            return value
        if isinstance(value, (QQ.dtype, Fraction, Rational)):
            return RationalField().to_representation(value)
        if isinstance(value, (int, float, str)):
            return value
        return str(value)


class CheckSerializer(serializers.Serializer):
    name = serializers.CharField()
    status = serializers.CharField()
    witness = serializers.SerializerMethodField()
    detail = serializers.CharField(allow_blank=True)

    def get_witness(self, check):
        if check.witness is None:
            return None
        if isinstance(check.witness, PolyElement):
            return format_poly(check.witness)
        return str(check.witness)


class ReportSerializer(serializers.Serializer):
    command = serializers.CharField()
    status = serializers.CharField()
    checks = CheckSerializer(many=True)
    result = ResultField()
    notes = serializers.ListField(child=serializers.CharField())
    timing = serializers.FloatField(required=False)
    version = serializers.CharField()

    def to_representation(self, report):
        data = super().to_representation(report)
        if report.timing is None:
            data.pop("timing", None)
        return data


def render_json(report):
    return JSONRenderer().render(ReportSerializer(report).data).decode()
