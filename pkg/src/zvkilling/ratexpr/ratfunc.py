"""Canonical rational functions over Q."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from . import gcd as _g
from .polynomial import Polynomial, common_variables, poly_from_int_terms


class SingularPointError(ZeroDivisionError):
    """A denominator vanishes at the requested evaluation point."""

    def __init__(self, message: str, polynomial: Polynomial | None = None):
        super().__init__(message)
        self.polynomial = polynomial


def _int_gcd_poly(a: Polynomial, b: Polynomial) -> Polynomial:
    _, ta = a.to_integer_terms()
    _, tb = b.to_integer_terms()
    g = _g.poly_gcd(ta, tb, len(a.variables))
    return poly_from_int_terms(a.variables, g)


def polynomial_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """GCD of two polynomials, primitive with positive leading coefficient."""
    a, b = a._align(b)
    if a.is_zero() and b.is_zero():
        return a
    return _int_gcd_poly(a, b)


def polynomial_divide_exact(a: Polynomial, b: Polynomial) -> Polynomial:
    a, b = a._align(b)
    da, ta = a.to_integer_terms()
    db, tb = b.to_integer_terms()
    # a/b = (ta/da) / (tb/db); scale ta so the integer division is exact
    lead = _g.leading(tb)[1]
    k = abs(lead)
    q = _g.divide_exact(_g.scale(ta, k), tb)
    return poly_from_int_terms(a.variables, q, Fraction(db, da * k))


def polynomial_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    a, b = a._align(b)
    g = polynomial_gcd(a, b)
    return polynomial_divide_exact(a * b, g)


class RationalFunction:
    """``num/den`` with ``gcd(num, den) = 1`` and ``den`` monic (grlex).

    Instances are immutable; arithmetic returns canonical results so
    ``==`` is structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical: bool = False):
        if not isinstance(num, Polynomial):
            raise TypeError("numerator must be a Polynomial")
        if den is None:
            den = Polynomial.constant(num.variables, 1)
        num, den = num._align(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den

    @property
    def variables(self):
        return self.num.variables

    @classmethod
    def constant(cls, variables: Sequence[str], value) -> "RationalFunction":
        return cls(Polynomial.constant(variables, value), _canonical=True)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "RationalFunction":
        return cls(Polynomial.variable(variables, name), _canonical=True)

    def with_variables(self, variables) -> "RationalFunction":
        return RationalFunction(self.num.with_variables(variables),
                                self.den.with_variables(variables), _canonical=True)

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.variables, other)
        return NotImplemented

    def _align(self, other: "RationalFunction"):
        if self.variables == other.variables:
            return self, other
        merged = common_variables([self.num, other.num])
        return self.with_variables(merged), other.with_variables(merged)

    # arithmetic -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        if a.den == b.den:
            return RationalFunction(a.num + b.num, a.den)
        if a.den.is_constant() and b.den.is_constant():
            return RationalFunction(a.num * b.den.constant_value() + b.num * a.den.constant_value(),
                                    a.den * b.den.constant_value())
        g = polynomial_gcd(a.den, b.den)
        if g.is_constant():
            return RationalFunction(a.num * b.den + b.num * a.den, a.den * b.den)
        ad = polynomial_divide_exact(a.den, g)
        bd = polynomial_divide_exact(b.den, g)
        return RationalFunction(a.num * bd + b.num * ad, ad * b.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RationalFunction.constant(self.variables, 0)
            return RationalFunction(self.num * other, self.den, _canonical=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        if a.is_zero() or b.is_zero():
            return RationalFunction.constant(a.variables, 0)
        # cross-cancel before multiplying keeps the gcds small
        g1 = polynomial_gcd(a.num, b.den)
        g2 = polynomial_gcd(b.num, a.den)
        n1, d2 = a.num, b.den
        if not g1.is_constant():
            n1 = polynomial_divide_exact(n1, g1)
            d2 = polynomial_divide_exact(d2, g1)
        n2, d1 = b.num, a.den
        if not g2.is_constant():
            n2 = polynomial_divide_exact(n2, g2)
            d1 = polynomial_divide_exact(d1, g2)
        return RationalFunction(*_monic(n1 * n2, d1 * d2), _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(*_monic(self.den, self.num), _canonical=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("exponent must be an integer")
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(*_monic(self.num ** k, self.den ** k), _canonical=True)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    # calculus and evaluation ---------------------------------------------

    def diff(self, var: str) -> "RationalFunction":
        """Derivative by the quotient rule, returned in canonical form."""
        dn = self.num.diff(var)
        if self.den.is_constant():
            return RationalFunction(dn, self.den, _canonical=True) if dn else \
                RationalFunction.constant(self.variables, 0)
        dd = self.den.diff(var)
        if dd.is_zero():
            return RationalFunction(dn, self.den)
        # d(n/d) = (n' d - n d') / d^2; only the factor gcd(d, d') can cancel
        g = polynomial_gcd(self.den, dd)
        dg = polynomial_divide_exact(self.den, g)
        num = dn * dg - self.num * polynomial_divide_exact(dd, g)
        return RationalFunction(num, dg * self.den)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise SingularPointError(
                f"denominator {self.den} vanishes at {dict(point)}", self.den)
        return self.num.evaluate(point) / d

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        return self.num.evaluate_float(point) / self.den.evaluate_float(point)

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        return format_rational_function(self)


def _monic(num: Polynomial, den: Polynomial):
    lc = den.leading_term()[1]
    if lc != 1:
        inv = 1 / lc
        num = num * inv
        den = den * inv
    return num, den


def _canonicalize(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return num, Polynomial.constant(num.variables, 1)
    if not den.is_constant():
        g = polynomial_gcd(num, den)
        if not g.is_constant():
            num = polynomial_divide_exact(num, g)
            den = polynomial_divide_exact(den, g)
    return _monic(num, den)


def format_rational_function(f: RationalFunction) -> str:
    from .polynomial import format_polynomial

    num = format_polynomial(f.num)
    if f.den.is_constant() and f.den.constant_value() == 1:
        return num
    den = format_polynomial(f.den)
    if len(f.num.terms) > 1:
        num = f"({num})"
    if len(f.den.terms) > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"
