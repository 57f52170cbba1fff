"""Jet bookkeeping, prolongation and exact matrix assembly.

A prolonged equation is ``D^alpha (L_j E_j)`` where ``L_j`` clears the
denominators of base equation ``E_j``. By Leibniz,

    D^alpha (c * D^beta u) = sum_{gamma <= alpha} C(alpha, gamma) D^(alpha-gamma) c * D^(beta+gamma) u,

so only derivatives of the (polynomial) cleared coefficients are needed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import comb
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exactla import SparseRationalMatrix
from .pde import LinearPDESystem, MultiIndex, Unknown
from .ratexpr import Polynomial, RationalFunction
from .ratexpr.ratfunc import SingularPointError, polynomial_divide_exact, polynomial_lcm

log = logging.getLogger(__name__)


def multi_indices(order: int) -> List[MultiIndex]:
    """Multi-indices of exactly ``order``, x-heavy first."""
    return [(order - b, b) for b in range(order + 1)]


def multi_indices_upto(order: int) -> List[MultiIndex]:
    return [mi for r in range(order + 1) for mi in multi_indices(r)]


def jet_dimension(num_unknowns: int, n: int) -> int:
    """Number of jets of order <= n+1 for ``num_unknowns`` functions of two variables."""
    return num_unknowns * comb(n + 3, 2)


@dataclass(frozen=True)
class JetIndex:
    unknown: Unknown
    multi_index: MultiIndex


def jet_column(unknown_pos: int, mi: MultiIndex, num_unknowns: int) -> int:
    """Column of a jet: by total order, then x-heavy multi-index, then unknown."""
    a, b = mi
    r = a + b
    return num_unknowns * (r * (r + 1) // 2 + b) + unknown_pos


def column_key(s: LinearPDESystem, n: int) -> List[JetIndex]:
    return [JetIndex(u, mi) for mi in multi_indices_upto(n + 1) for u in s.unknowns]


@dataclass
class ClearedEquation:
    """Base equation times the lcm of its denominators."""

    multiplier: Polynomial
    terms: List[Tuple[int, MultiIndex, Polynomial]]


def clear_denominators(s: LinearPDESystem) -> List[ClearedEquation]:
    pos = s.unknown_position()
    out = []
    for eq in s.equations:
        if not eq.terms:
            out.append(ClearedEquation(Polynomial.constant(s.variables, 1), []))
            continue
        dens = [t.coefficient.den for t in eq.terms]
        L = reduce(lambda a, b: a if a == b else polynomial_lcm(a, b), dens)
        terms = []
        for t in eq.terms:
            c = t.coefficient
            p = c.num * polynomial_divide_exact(L, c.den) if c.den != L else c.num
            terms.append((pos[t.unknown], t.derivative, p))
        out.append(ClearedEquation(L, terms))
    return out


class DerivativeCache:
    """Derivatives of the cleared coefficients, evaluated at one point.

    Keyed by (base equation, term, multi-index); symbolic derivatives are
    computed once and shared by every prolongation level.
    """

    def __init__(self, cleared: Sequence[ClearedEquation], variables: Sequence[str],
                 point: Mapping[str, object]):
        self.cleared = cleared
        self.variables = tuple(variables)
        self.point = {k: Fraction(v) for k, v in point.items()}
        self._poly: Dict[Tuple[int, int, MultiIndex], Polynomial] = {}
        self.values: Dict[Tuple[int, int, MultiIndex], Fraction] = {}

    def poly(self, j: int, t: int, mi: MultiIndex) -> Polynomial:
        k = (j, t, mi)
        if k not in self._poly:
            a, b = mi
            if (a, b) == (0, 0):
                self._poly[k] = self.cleared[j].terms[t][2]
            elif a:
                self._poly[k] = self.poly(j, t, (a - 1, b)).diff(self.variables[0])
            else:
                self._poly[k] = self.poly(j, t, (a, b - 1)).diff(self.variables[1])
        return self._poly[k]

    def value(self, j: int, t: int, mi: MultiIndex) -> Fraction:
        k = (j, t, mi)
        v = self.values.get(k)
        if v is None:
            v = self.values[k] = self.poly(j, t, mi).evaluate(self.point)
        return v


@dataclass
class ProlongedSystem:
    base: LinearPDESystem
    level: int
    cleared: List[ClearedEquation]
    # (base equation id, differentiation multi-index), in matrix row order
    equations: List[Tuple[int, MultiIndex]]

    @property
    def num_unknowns(self) -> int:
        return len(self.base.unknowns)

    @property
    def num_jets(self) -> int:
        return jet_dimension(self.num_unknowns, self.level)

    def row_terms(self, row: int) -> Iterator[Tuple[int, MultiIndex, Polynomial]]:
        """Symbolic terms ``(unknown position, jet multi-index, coefficient)`` of a row."""
        j, (c, d) = self.equations[row]
        for u, beta, p in self.cleared[j].terms:
            for g1 in range(c + 1):
                for g2 in range(d + 1):
                    q = p
                    for _ in range(c - g1):
                        q = q.diff(self.base.variables[0])
                    for _ in range(d - g2):
                        q = q.diff(self.base.variables[1])
                    if q:
                        yield u, (beta[0] + g1, beta[1] + g2), q * (comb(c, g1) * comb(d, g2))


def prolong(s: LinearPDESystem, n: int, cleared: Optional[List[ClearedEquation]] = None) -> ProlongedSystem:
    """The ``n``-th prolongation: every base equation differentiated by every |alpha| <= n."""
    if n < 0:
        raise ValueError("prolongation level must be non-negative")
    if cleared is None:
        cleared = clear_denominators(s)
    rows = [(j, mi) for mi in multi_indices_upto(n) for j in range(len(s.equations))]
    return ProlongedSystem(s, n, cleared, rows)


@dataclass
class AssembledMatrix:
    matrix: SparseRationalMatrix
    point: Dict[str, Fraction]
    column_key: List[JetIndex]
    row_key: List[Tuple[int, MultiIndex]]
    level: int

    @property
    def rows(self) -> int:
        return self.matrix.rows

    @property
    def cols(self) -> int:
        return self.matrix.cols

    @property
    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        return self.matrix.entries


def suggest_points(point: Mapping[str, Fraction], count: int = 4) -> List[Dict[str, Fraction]]:
    """Nearby rational points to retry with when assembly hits a singularity."""
    keys = list(point)
    out = []
    for k in range(1, count + 1):
        out.append({v: Fraction(point[v]) + Fraction(k, 7 + i) for i, v in enumerate(keys)})
    return out


def _check_point(ps: ProlongedSystem, point: Mapping[str, Fraction]) -> None:
    for eq in ps.cleared:
        if eq.multiplier.evaluate(point) == 0:
            near = ", ".join("(" + ", ".join(str(v) for v in p.values()) + ")" for p in suggest_points(point))
            raise SingularPointError(
                f"cleared denominator {eq.multiplier} vanishes at the evaluation point; try one of {near}",
                eq.multiplier)


def assemble(ps: ProlongedSystem, point: Mapping[str, object],
             cache: Optional[DerivativeCache] = None) -> AssembledMatrix:
    """Exact matrix of the prolonged system at ``point``."""
    point = {k: Fraction(v) for k, v in point.items()}
    _check_point(ps, point)
    if cache is None or cache.point != point or cache.cleared is not ps.cleared:
        cache = DerivativeCache(ps.cleared, ps.base.variables, point)
    m = ps.num_unknowns
    entries: Dict[Tuple[int, int], Fraction] = {}
    for r, (j, (c, d)) in enumerate(ps.equations):
        row: Dict[int, Fraction] = {}
        for t, (u, beta, _) in enumerate(ps.cleared[j].terms):
            for g1 in range(c + 1):
                for g2 in range(d + 1):
                    v = cache.value(j, t, (c - g1, d - g2))
                    if not v:
                        continue
                    col = jet_column(u, (beta[0] + g1, beta[1] + g2), m)
                    row[col] = row.get(col, 0) + v * (comb(c, g1) * comb(d, g2))
        for col, v in row.items():
            if v:
                entries[(r, col)] = v
    cols = jet_dimension(m, ps.level)
    mat = SparseRationalMatrix(len(ps.equations), cols, entries)
    return AssembledMatrix(mat, point, column_key(ps.base, ps.level), list(ps.equations), ps.level)


@dataclass
class SymbolMatrix:
    matrix: SparseRationalMatrix
    point: Dict[str, Fraction]
    level: int
    column_key: List[JetIndex]
    nonzero_rows: int
    distinct_rows: int
    row_key: List[Tuple[int, MultiIndex]] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return self.matrix.rows

    @property
    def cols(self) -> int:
        return self.matrix.cols


def _projective_key(row: Dict[int, Fraction]) -> tuple:
    first = min(row)
    s = row[first]
    return tuple(sorted((c, v / s) for c, v in row.items()))


def symbol_assemble(s: LinearPDESystem, n: int, point: Mapping[str, object]) -> SymbolMatrix:
    """Top-order part of the order-``n`` prolongations, on jets of order ``n+1``.

    Rows with a zero symbol are dropped and rows proportional to an
    earlier row are merged; both counts are recorded.
    """
    point = {k: Fraction(v) for k, v in point.items()}
    ps = prolong(s, 0)
    _check_point(ps, point)
    m = len(s.unknowns)
    base_col = m * ((n + 1) * (n + 2) // 2)
    seen = set()
    rows: List[Dict[int, Fraction]] = []
    row_key = []
    nonzero = 0
    values: Dict[Tuple[int, int], Fraction] = {}
    for mi in multi_indices(n):
        for j, eq in enumerate(ps.cleared):
            row: Dict[int, Fraction] = {}
            for t, (u, beta, p) in enumerate(eq.terms):
                if sum(beta) != 1:
                    continue
                if (j, t) not in values:
                    values[(j, t)] = p.evaluate(point)
                v = values[(j, t)]
                if v:
                    col = jet_column(u, (beta[0] + mi[0], beta[1] + mi[1]), m) - base_col
                    row[col] = row.get(col, 0) + v
            row = {c: v for c, v in row.items() if v}
            if not row:
                continue
            nonzero += 1
            key = _projective_key(row)
            if key in seen:
                continue
            seen.add(key)
            rows.append(row)
            row_key.append((j, mi))
    cols = m * (n + 2)
    mat = SparseRationalMatrix.from_rows(rows, cols)
    ckey = [JetIndex(u, mi) for mi in multi_indices(n + 1) for u in s.unknowns]
    return SymbolMatrix(mat, point, n, ckey, nonzero, len(rows), row_key)
