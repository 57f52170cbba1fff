"""Sparse multivariate polynomials with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]


def _grlex_key(exp: Exponent) -> tuple:
    return (sum(exp), exp)


class Polynomial:
    """An immutable polynomial over Q in an ordered list of variables.

    Terms are stored as ``{exponent tuple: Fraction}`` with no zero
    coefficients, so two polynomials over the same variables are equal
    iff their term maps are equal. Binary operations between polynomials
    over different variable lists work in the union of both lists.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, object] = ()):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in dict(terms).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match {n} variables")
            c = Fraction(c)
            if c:
                clean[exp] = c
        self.terms = clean
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, variables: tuple, terms: Dict[Exponent, Fraction]) -> "Polynomial":
        p = cls.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, variables: Sequence[str], value) -> "Polynomial":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls._raw(variables, {exp: Fraction(1)})

    def with_variables(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express over ``variables`` (a superset of the used ones)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {v: i for i, v in enumerate(variables)}
        out = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, exp):
                if e:
                    if v not in index:
                        raise ValueError(f"variable {v!r} is used but not in {variables}")
                    new[index[v]] = e
            out[tuple(new)] = c
        return Polynomial._raw(variables, out)

    def _align(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        if self.variables == other.variables:
            return self, other
        merged = list(self.variables) + [v for v in other.variables if v not in self.variables]
        return self.with_variables(merged), other.with_variables(merged)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.variables, other)
        return NotImplemented

    # queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        i = self.variables.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def used_variables(self) -> Tuple[str, ...]:
        used = [False] * len(self.variables)
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def leading_term(self) -> Tuple[Exponent, Fraction]:
        """Leading (exponent, coefficient) under graded lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        out = dict(a.terms)
        for exp, c in b.terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Polynomial._raw(a.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.variables, {e: -c for e, c in self.terms.items()})

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
                return Polynomial._raw(self.variables, {})
            return Polynomial._raw(self.variables, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(a.variables, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            used = self.used_variables()
            canon = self.with_variables(used) if used != self.variables else self
            self._hash = hash((canon.variables, frozenset(canon.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # calculus and evaluation ---------------------------------------------

    def diff(self, var: str) -> "Polynomial":
        if var not in self.variables:
            return Polynomial._raw(self.variables, {})
        i = self.variables.index(var)
        out = {}
        for exp, c in self.terms.items():
            e = exp[i]
            if e:
                new = exp[:i] + (e - 1,) + exp[i + 1:]
                out[new] = c * e
        return Polynomial._raw(self.variables, out)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        """Exact value at ``point`` (must assign every used variable)."""
        values = []
        for v in self.variables:
            if v in point:
                values.append(Fraction(point[v]))
            else:
                values.append(None)
        total = Fraction(0)
        powers: Dict[Tuple[int, int], Fraction] = {}
        for exp, c in self.terms.items():
            term = c
            for i, e in enumerate(exp):
                if e:
                    if values[i] is None:
                        raise KeyError(f"no value for variable {self.variables[i]!r}")
                    key = (i, e)
                    if key not in powers:
                        powers[key] = values[i] ** e
                    term *= powers[key]
            total += term
        return total

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        vals = [point.get(v, 0.0) for v in self.variables]
        total = 0.0
        for exp, c in self.terms.items():
            term = float(c)
            for v, e in zip(vals, exp):
                if e:
                    term *= v ** e
            total += term
        return total

    # integer views --------------------------------------------------------

    def denominator_lcm(self) -> int:
        return lcm(1, *(c.denominator for c in self.terms.values()))

    def integer_content(self) -> int:
        return gcd(*(c.numerator for c in self.terms.values())) if self.terms else 0

    def to_integer_terms(self) -> Tuple[int, Dict[Exponent, int]]:
        """Return ``(d, terms)`` with integer terms such that ``self == terms / d``."""
        d = self.denominator_lcm()
        return d, {e: (c * d).numerator for e, c in self.terms.items()}

    # printing -------------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        return format_polynomial(self)


def _format_monomial(variables: Sequence[str], exp: Exponent) -> str:
    parts = []
    for v, e in zip(variables, exp):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render ``p`` in the expression grammar (highest grlex term first)."""
    if not p.terms:
        return "0"
    out = []
    for exp, c in p.sorted_terms():
        mono = _format_monomial(p.variables, exp)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def poly_from_int_terms(variables: Sequence[str], terms: Mapping[Exponent, int], scale=1) -> Polynomial:
    scale = Fraction(scale)
    return Polynomial._raw(tuple(variables), {e: Fraction(c) * scale for e, c in terms.items() if c})


def common_variables(polys: Iterable[Polynomial]) -> Tuple[str, ...]:
    merged: list = []
    for p in polys:
        for v in p.variables:
            if v not in merged:
                merged.append(v)
    return tuple(merged)
