# rinehart/fields.py
from fractions import Fraction

from rest_framework import serializers
from sympy import Matrix, Rational, zeros
from sympy.polys.rings import PolyElement

from .utils import rational_str, to_rational


class RationalField(serializers.Field):
    def to_representation(self, value):
        # Exact rationals travel as "num/den" strings
        return rational_str(value)

    def to_internal_value(self, data):
        try:
            return to_rational(Fraction(str(data)))
        except (ValueError, ZeroDivisionError):
            raise serializers.ValidationError(f"Invalid rational '{data}'")


class PolyField(serializers.Field):
    """A polynomial as [{"coeff": "num/den", "exp": [...]}] in descending monomial order."""

    def __init__(self, ctx=None, **kwargs):
        self.ctx = ctx
        super().__init__(**kwargs)

    def to_representation(self, value):
        rational = RationalField()
        return [
            {"coeff": rational.to_representation(coeff), "exp": list(monom)}
            for monom, coeff in value.terms()
        ]

    def to_internal_value(self, data):
        ctx = self.ctx or self.context.get("ring")
        if ctx is None:
            raise serializers.ValidationError("A polynomial needs a ring context")
        if isinstance(data, PolyElement):
            return ctx.coerce(data)
        if isinstance(data, str):
            return ctx.parse(data)
        if not isinstance(data, list):
            raise serializers.ValidationError("Expected a list of terms or polynomial text")
        rational = RationalField()
        terms = {}
        for term in data:
            try:
                exponents = tuple(int(e) for e in term["exp"])
                coeff = rational.to_internal_value(term["coeff"])
            except (KeyError, TypeError, ValueError):
                raise serializers.ValidationError(f"Invalid polynomial term {term!r}")
            if len(exponents) != ctx.nvars:
                raise serializers.ValidationError(f"Term {term!r} needs {ctx.nvars} exponents")
            terms[exponents] = terms.get(exponents, 0) + coeff
        return ctx.poly(terms)


class MatrixField(serializers.Field):
    """A sympy matrix as its shape and rows of "num/den" strings."""

    def to_representation(self, value):
        rational = RationalField()
        return {
            "shape": list(value.shape),
            "rows": [[rational.to_representation(value[r, c]) for c in range(value.cols)] for r in range(value.rows)],
        }

    def to_internal_value(self, data):
        try:
            nrows, ncols = (int(n) for n in data["shape"])
            rows = data.get("rows", [])
            if len(rows) != nrows or any(len(row) != ncols for row in rows):
                raise ValueError
            if nrows == 0 or ncols == 0:
                return zeros(nrows, ncols)
            return Matrix([[Rational(str(c)) for c in row] for row in rows])
        except (KeyError, TypeError, ValueError):
            raise serializers.ValidationError(f"Invalid matrix {data!r}")
