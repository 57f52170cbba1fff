"""Truncated bivariate Taylor series with exact coefficients.

Used to get the jets of known solutions (products of Hamiltonian
coefficients) without symbolic differentiation.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Dict, Mapping, Sequence, Tuple

from .ratexpr import Polynomial, RationalFunction
from .ratexpr.ratfunc import SingularPointError


class TaylorSeries:
    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Mapping[Tuple[int, int], Fraction] = ()):
        self.order = order
        self.coeffs = {k: Fraction(v) for k, v in dict(coeffs).items() if v and sum(k) <= order}

    @classmethod
    def of_polynomial(cls, p: Polynomial, variables: Sequence[str], point: Mapping[str, Fraction],
                      order: int) -> "TaylorSeries":
        p = p.with_variables(variables)
        x0, y0 = (Fraction(point[v]) for v in variables)
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), c in p.terms.items():
            for a in range(min(i, order) + 1):
                ca = c * comb(i, a) * x0 ** (i - a)
                if not ca:
                    continue
                for b in range(min(j, order - a) + 1):
                    v = ca * comb(j, b) * y0 ** (j - b)
                    if v:
                        out[(a, b)] = out.get((a, b), 0) + v
        return cls(order, out)

    @classmethod
    def of_rational_function(cls, f: RationalFunction, variables: Sequence[str],
                             point: Mapping[str, Fraction], order: int) -> "TaylorSeries":
        num = cls.of_polynomial(f.num, variables, point, order)
        den = cls.of_polynomial(f.den, variables, point, order)
        return num / den

    def __add__(self, other: "TaylorSeries") -> "TaylorSeries":
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return TaylorSeries(order, out)

    def __neg__(self):
        return TaylorSeries(self.order, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TaylorSeries(self.order, {k: v * other for k, v in self.coeffs.items()})
        order = min(self.order, other.order)
        out: Dict[Tuple[int, int], Fraction] = {}
        for (a1, b1), v1 in self.coeffs.items():
            for (a2, b2), v2 in other.coeffs.items():
                if a1 + b1 + a2 + b2 <= order:
                    k = (a1 + a2, b1 + b2)
                    out[k] = out.get(k, 0) + v1 * v2
        return TaylorSeries(order, out)

    __rmul__ = __mul__

    def __truediv__(self, other: "TaylorSeries") -> "TaylorSeries":
        order = min(self.order, other.order)
        d0 = other.coeffs.get((0, 0), 0)
        if not d0:
            raise SingularPointError("series division by a function vanishing at the point")
        q: Dict[Tuple[int, int], Fraction] = {}
        for r in range(order + 1):
            for b in range(r + 1):
                k = (r - b, b)
                s = self.coeffs.get(k, Fraction(0))
                for (da, db), dv in other.coeffs.items():
                    if (da, db) == (0, 0):
                        continue
                    qa, qb = k[0] - da, k[1] - db
                    if qa >= 0 and qb >= 0 and (qa, qb) in q:
                        s -= dv * q[(qa, qb)]
                if s:
                    q[k] = s / d0
        return TaylorSeries(order, q)

    def derivative_at_point(self, mi: Tuple[int, int]) -> Fraction:
        a, b = mi
        return self.coeffs.get((a, b), Fraction(0)) * factorial(a) * factorial(b)
