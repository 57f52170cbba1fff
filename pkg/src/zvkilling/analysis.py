"""Trivial integrals, Delta tables, finite-type level and the verdict.

At prolongation level ``n`` the jets of order ``<= n+1`` are treated as
independent unknowns ``u`` and the prolonged system becomes ``A u = 0``.
Polynomials in ``H`` and the two cyclic momenta are always integrals, so
their jets lie in the kernel of ``A``;

    Delta(n) = dim(u) - rank(A) - (dimension of the trivial jets)

counts the remaining freedom. Once ``n`` reaches the finite-type level
(where the symbol of the prolonged system becomes injective on the top
jets), ``Delta = 0`` proves that every polynomial integral of this
degree is trivial. A positive Delta at one point proves nothing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .exactla import RankResult, SparseRationalMatrix, compute_rank, kernel_basis, vectors_rank
from .metric import Hamiltonian, MetricSpec, hamiltonian, invert
from .pde import LinearPDESystem, Unknown, build_system, monomials, substitute
from .prolongation import (DerivativeCache, assemble, clear_denominators, jet_dimension, multi_indices_upto,
                           prolong, symbol_assemble)
from .ratexpr import RationalFunction
from .series import TaylorSeries

log = logging.getLogger(__name__)

NO_NONTRIVIAL = "NoNontrivialIntegral"
CANDIDATE = "CandidateKernel"
INCONCLUSIVE = "Inconclusive"

MomentumPoly = Dict[Tuple[int, ...], object]


# --- trivial integrals -------------------------------------------------------


def _mp_mul(a: MomentumPoly, b: MomentumPoly) -> MomentumPoly:
    out: MomentumPoly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            t = c1 * c2
            out[e] = out[e] + t if e in out else t
    return out


@dataclass(frozen=True)
class TrivialBasis:
    """Products ``H^a * I1^b * I2^c`` with ``2a + b + c = degree``.

    ``I1`` and ``I2`` are the momenta conjugate to the cyclic coordinates.
    """

    degree: int
    parity: str
    hamiltonian: Hamiltonian
    exponents: Tuple[Tuple[int, int, int], ...]

    def __len__(self):
        return len(self.exponents)

    def expand(self, k: int, lift: Callable[[RationalFunction], object], one) -> MomentumPoly:
        """Expand generator ``k`` with coefficients mapped through ``lift``."""
        a, b, c = self.exponents[k]
        h = self.hamiltonian
        cyc = [h.metric.coords.index(v) for v in h.metric.cyclic]
        mono = [0, 0, 0, 0]
        mono[cyc[0]] += b
        mono[cyc[1]] += c
        poly: MomentumPoly = {tuple(mono): one}
        hl = {e: lift(v) for e, v in h.terms.items()}
        for _ in range(a):
            poly = _mp_mul(poly, hl)
        return poly

    def symbolic(self, k: int) -> Dict[Tuple[int, ...], RationalFunction]:
        V = self.hamiltonian.variables
        poly = self.expand(k, lambda f: f, RationalFunction.constant(V, 1))
        return {e: c for e, c in poly.items() if not c.is_zero()}

    def series(self, k: int, point: Mapping[str, Fraction], order: int) -> Dict[Tuple[int, ...], TaylorSeries]:
        V = self.hamiltonian.variables
        one = TaylorSeries(order, {(0, 0): 1})
        return self.expand(k, lambda f: TaylorSeries.of_rational_function(f, V, point, order), one)

    def label(self, k: int) -> str:
        a, b, c = self.exponents[k]
        m = self.hamiltonian.metric
        parts = []
        for name, e in (("H", a), (f"p_{m.cyclic[0]}", b), (f"p_{m.cyclic[1]}", c)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"


def trivial_basis(degree: int, parity: str, h: Hamiltonian) -> TrivialBasis:
    if degree < 1:
        raise ValueError("degree must be at least 1")
    want = 1 if parity == "odd" else 0
    exps = []
    for a in range(degree // 2, -1, -1):
        rest = degree - 2 * a
        for b in range(rest, -1, -1):
            c = rest - b
            if parity == "mixed" or (b + c) % 2 == want:
                exps.append((a, b, c))
    return TrivialBasis(degree, parity, h, tuple(exps))


def trivial_jet_vectors(basis: TrivialBasis, system: LinearPDESystem, point: Mapping[str, object],
                        n: int) -> List[List[Fraction]]:
    """Jets (order <= n+1) of every trivial generator, in the matrix column order."""
    point = {k: Fraction(v) for k, v in point.items()}
    basis.hamiltonian.metric.check_point(point)
    order = n + 1
    out = []
    mis = multi_indices_upto(order)
    for k in range(len(basis)):
        coeffs = basis.series(k, point, order)
        vec = []
        for mi in mis:
            for u in system.unknowns:
                s = coeffs.get(u.index)
                vec.append(s.derivative_at_point(mi) if s is not None else Fraction(0))
        out.append(vec)
    return out


def bracket_residuals(basis: TrivialBasis, system: LinearPDESystem, k: int) -> List[RationalFunction]:
    """Symbolic residuals of the system with generator ``k`` substituted."""
    coeffs = basis.symbolic(k)
    sol = {u: coeffs[u.index] for u in system.unknowns if u.index in coeffs}
    return substitute(system, sol)


# --- tables ----------------------------------------------------------------


@dataclass
class DeltaRow:
    n: int
    num_equations: int
    dim_u: int
    rank: int
    delta: int
    trivial_dim: int
    certified: bool
    certificate: str
    kernel_contains_trivial: bool
    method: str
    primes: List[int] = field(default_factory=list)
    nnz: int = 0
    max_entry_bits: int = 0

    def to_dict(self) -> dict:
        return {"n": self.n, "num_equations": self.num_equations, "dim_u": self.dim_u, "rank": self.rank,
                "delta": self.delta, "trivial_dim": self.trivial_dim, "certified": self.certified,
                "certificate": self.certificate, "kernel_contains_trivial": self.kernel_contains_trivial,
                "method": self.method, "primes": list(self.primes), "nnz": self.nnz,
                "max_entry_bits": self.max_entry_bits}


@dataclass
class DeltaTable:
    parity: str
    degree: int
    point: Dict[str, Fraction]
    rows: List[DeltaRow]
    trivial_dim: int
    notes: List[str] = field(default_factory=list)
    last_matrix: Optional[SparseRationalMatrix] = None
    trivial_vectors: Optional[List[List[Fraction]]] = None

    def row(self, n: int) -> DeltaRow:
        return next(r for r in self.rows if r.n == n)

    @property
    def deltas(self) -> List[int]:
        return [r.delta for r in self.rows]


@dataclass
class FiniteTypeRow:
    n: int
    symbol_rows: int
    symbol_rows_nonzero: int
    dim_v: int
    symbol_rank: int
    symbol_delta: int
    certified: bool

    def to_dict(self) -> dict:
        return {"n": self.n, "num_equations": self.symbol_rows, "nonzero_rows": self.symbol_rows_nonzero,
                "dim_v": self.dim_v, "rank": self.symbol_rank, "delta": self.symbol_delta,
                "certified": self.certified}


@dataclass
class FiniteTypeReport:
    parity: str
    rows: List[FiniteTypeRow]
    ell: Optional[int]

    @property
    def deltas(self) -> List[int]:
        return [r.symbol_delta for r in self.rows]


@dataclass
class Verdict:
    outcome: str
    justification: dict
    kernel_dimension: Optional[int] = None
    excess: Optional[int] = None
    sample_kernel: List[Dict[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome, "justification": self.justification}
        if self.outcome == CANDIDATE:
            out["kernel_dimension"] = self.kernel_dimension
            out["excess_over_trivial"] = self.excess
            out["sample_kernel"] = self.sample_kernel
        return out


def _pt(point) -> Dict[str, Fraction]:
    return {k: Fraction(v) for k, v in point.items()}


class IntegralSearch:
    """Shared state for one (metric, degree, point) analysis.

    Builds the Hamiltonian and the bracket system once; the per-parity
    computations reuse the cleared equations and derivative caches.
    """

    def __init__(self, metric: MetricSpec, degree: int, point: Mapping[str, object],
                 rank_method: str = "both", primes: Optional[Sequence[int]] = None, prime_count: int = 2,
                 seed: int = 0, max_degree: int = 8, store=None):
        self.metric = metric
        self.degree = degree
        self.point = _pt(point)
        self.rank_method = rank_method
        self.primes = primes
        self.prime_count = prime_count
        self.seed = seed
        missing = [v for v in metric.base_coords if v not in self.point]
        if missing:
            raise ValueError(f"evaluation point does not assign {missing}")
        metric.check_point(self.point)
        self.hamiltonian = hamiltonian(invert(metric))
        self.max_degree = max_degree
        # optional persistent store with load/save_matrix and load/save_derivatives
        self.store = store
        self._systems: Dict[str, LinearPDESystem] = {}
        self._cleared: Dict[str, list] = {}
        self._caches: Dict[str, DerivativeCache] = {}
        self.on_level: Optional[Callable[[str, DeltaRow, SparseRationalMatrix], None]] = None

    def system(self, parity: str) -> LinearPDESystem:
        if parity not in self._systems:
            self._systems[parity] = build_system(self.hamiltonian, self.degree, parity, self.max_degree)
        return self._systems[parity]

    def cleared(self, parity: str):
        if parity not in self._cleared:
            self._cleared[parity] = clear_denominators(self.system(parity))
        return self._cleared[parity]

    def cache(self, parity: str) -> DerivativeCache:
        if parity not in self._caches:
            c = DerivativeCache(self.cleared(parity), self.metric.base_coords, self.point)
            if self.store is not None:
                c.values.update(self.store.load_derivatives(self.key(parity)))
            self._caches[parity] = c
        return self._caches[parity]

    def key(self, parity: str, n: Optional[int] = None) -> dict:
        k = {"metric": self.metric.fingerprint(), "degree": self.degree, "parity": parity,
             "point": [str(self.point[v]) for v in self.metric.base_coords]}
        if n is not None:
            k["n"] = n
        return k

    def basis(self, parity: str) -> TrivialBasis:
        return trivial_basis(self.degree, parity, self.hamiltonian)

    def matrix(self, parity: str, n: int) -> SparseRationalMatrix:
        if self.store is not None:
            m = self.store.load_matrix(self.key(parity, n))
            if m is not None:
                return m
        ps = prolong(self.system(parity), n, self.cleared(parity))
        cache = self.cache(parity)
        before = len(cache.values)
        m = assemble(ps, self.point, cache).matrix
        if self.store is not None:
            self.store.save_matrix(self.key(parity, n), m)
            if len(cache.values) != before:
                self.store.save_derivatives(self.key(parity), cache.values)
        return m

    def delta_row(self, parity: str, n: int) -> Tuple[DeltaRow, SparseRationalMatrix, List[List[Fraction]]]:
        a = self.matrix(parity, n)
        vecs = trivial_jet_vectors(self.basis(parity), self.system(parity), self.point, n)
        contained = all(a.annihilates(v) for v in vecs)
        tdim = vectors_rank(vecs)
        res: RankResult = compute_rank(a, self.rank_method, primes=self.primes, count=self.prime_count,
                                       seed=self.seed, kernel_vectors=vecs if contained else ())
        bits = max((max(v.numerator.bit_length(), v.denominator.bit_length())
                    for v in a.entries.values()), default=0)
        row = DeltaRow(n=n, num_equations=a.rows, dim_u=a.cols, rank=res.rank,
                       delta=a.cols - res.rank - tdim, trivial_dim=tdim,
                       certified=res.certified_exact and contained, certificate=res.certificate,
                       kernel_contains_trivial=contained, method=res.method, primes=list(res.primes_used),
                       nnz=a.nnz, max_entry_bits=bits)
        return row, a, vecs

    def delta_table(self, parity: str, n_max: int, stop_when_zero: bool = True, min_stop_level: int = 0,
                    confirm_levels: int = 0) -> DeltaTable:
        """Rows for n = 0..n_max.

        With ``stop_when_zero`` the table ends ``confirm_levels`` levels
        after the first certified Delta = 0 at ``n >= min_stop_level``.
        """
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        rows: List[DeltaRow] = []
        tdim = 0
        matrix = vecs = None
        stop_at = None
        for n in range(n_max + 1):
            row, matrix, vecs = self.delta_row(parity, n)
            rows.append(row)
            tdim = row.trivial_dim
            log.info("%s n=%d: %d x %d, rank %d, Delta %d (%s)", parity, n, row.num_equations, row.dim_u,
                     row.rank, row.delta, "certified" if row.certified else "uncertified")
            if self.on_level is not None:
                self.on_level(parity, row, matrix)
            if stop_when_zero and stop_at is None and row.delta == 0 and row.certified and n >= min_stop_level:
                stop_at = n + confirm_levels
            if stop_at is not None and n >= stop_at:
                break
        table = DeltaTable(parity, self.degree, dict(self.point), rows, tdim, last_matrix=matrix,
                           trivial_vectors=vecs)
        table.notes.extend(reference_notes(self.metric, self.degree, table))
        return table

    def finite_type(self, parity: str, n_max: int) -> FiniteTypeReport:
        s = self.system(parity)
        rows = []
        ell = None
        for n in range(n_max + 1):
            sym = symbol_assemble(s, n, self.point)
            res = compute_rank(sym.matrix, self.rank_method, primes=self.primes, count=self.prime_count,
                               seed=self.seed)
            d = sym.cols - res.rank
            rows.append(FiniteTypeRow(n, sym.distinct_rows, sym.nonzero_rows, sym.cols, res.rank, d,
                                      res.certified_exact))
            if d == 0 and res.certified_exact:
                ell = n
                break
        return FiniteTypeReport(parity, rows, ell)


def delta_table(metric: MetricSpec, degree: int, parity: str, point, n_max: int, **kwargs) -> DeltaTable:
    opts = {k: kwargs.pop(k) for k in ("stop_when_zero", "min_stop_level", "confirm_levels") if k in kwargs}
    return IntegralSearch(metric, degree, point, **kwargs).delta_table(parity, n_max, **opts)


def finite_type_level(metric: MetricSpec, degree: int, parity: str, point, n_max: int, **kwargs) -> FiniteTypeReport:
    return IntegralSearch(metric, degree, point, **kwargs).finite_type(parity, n_max)


# --- verdict -----------------------------------------------------------------


def _jet_label(system: LinearPDESystem, col: int, n: int) -> str:
    m = len(system.unknowns)
    mis = multi_indices_upto(n + 1)
    mi = mis[col // m]
    u = system.unknowns[col % m]
    if mi == (0, 0):
        return u.name
    return f"D^({mi[0]},{mi[1]}) {u.name}"


def candidate_samples(matrix: SparseRationalMatrix, trivial: Sequence[Sequence[Fraction]], system: LinearPDESystem,
                      n: int, limit: int = 3, max_cols: int = 2000) -> List[Dict[str, str]]:
    """Kernel vectors outside the trivial span, as {jet: value} maps (nonzero entries only)."""
    if matrix.cols > max_cols:
        return []
    out = []
    span = [list(v) for v in trivial]
    r = vectors_rank(span)
    for v in kernel_basis(matrix):
        r2 = vectors_rank(span + [v])
        if r2 > r:
            span.append(v)
            r = r2
            out.append({_jet_label(system, c, n): str(x) for c, x in enumerate(v) if x})
            if len(out) >= limit:
                break
    return out


def verdict(table: DeltaTable, ftype: FiniteTypeReport, system: Optional[LinearPDESystem] = None) -> Verdict:
    ell = ftype.ell
    just = {"point": {k: str(v) for k, v in table.point.items()}, "parity": table.parity, "ell": ell,
            "trivial_dim": table.trivial_dim,
            "levels": [{"n": r.n, "rank": r.rank, "delta": r.delta, "certified": r.certified} for r in table.rows]}
    if ell is None:
        just["reason"] = "finite type not reached within the computed symbol levels"
        return Verdict(INCONCLUSIVE, just)
    beyond = [r for r in table.rows if r.n >= ell]
    proof = next((r for r in beyond if r.delta == 0 and r.certified), None)
    if proof is not None:
        just["reason"] = (f"at n={proof.n} >= ell={ell} the kernel equals the {table.trivial_dim}-dimensional "
                          f"trivial jet space (rank {proof.rank} = {proof.dim_u} - {table.trivial_dim}, "
                          f"{proof.certificate})")
        just["n"] = proof.n
        return Verdict(NO_NONTRIVIAL, just)
    if len(beyond) >= 2 and beyond[-1].delta == beyond[-2].delta and beyond[-1].delta > 0:
        last = beyond[-1]
        just["reason"] = (f"Delta stabilized at {last.delta} for n={beyond[-2].n},{last.n} >= ell={ell}; "
                          "candidate jets only, existence of an integral is not established")
        just["n"] = last.n
        samples = []
        if system is not None and table.last_matrix is not None and table.rows[-1] is last:
            samples = candidate_samples(table.last_matrix, table.trivial_vectors or [], system, last.n)
        return Verdict(CANDIDATE, just, kernel_dimension=last.dim_u - last.rank, excess=last.delta,
                       sample_kernel=samples)
    if not beyond:
        just["reason"] = f"no level n >= ell={ell} was computed"
    elif any(r.delta == 0 for r in beyond):
        just["reason"] = "Delta = 0 reached but the rank is not certified"
    else:
        just["reason"] = "Delta has not reached 0 nor stabilized for n >= ell"
    return Verdict(INCONCLUSIVE, just)


# --- published reference values ---------------------------------------------

# Zipoy-Voorhees delta=2, degree 6, point (1/2, 2): (n label, #eqn, dim u, rank, Delta)
REFERENCE_TABLES = {
    "odd": [(0, 60, 120, 60, 60), (1, 180, 240, 180, 60), (2, 360, 400, 360, 40), (3, 600, 600, 590, 10),
            (4, 900, 840, 838, 2), (5, 1680, 1440, 1440, 0)],
    "even": [(0, 60, 132, 60, 56), (1, 180, 264, 180, 68), (2, 360, 440, 360, 64), (3, 600, 660, 600, 44),
             (4, 900, 924, 888, 20), (5, 1260, 1232, 1215, 1), (6, 1680, 1584, 1568, 0)],
}
REFERENCE_SYMBOL_EVEN = [(0, 60, 88, 60, 28), (1, 113, 132, 113, 19), (2, 166, 176, 166, 10),
                         (3, 219, 220, 214, 6), (4, 272, 264, 262, 2), (5, 325, 308, 307, 1),
                         (6, 378, 352, 352, 0)]


def _is_reference_case(metric: MetricSpec, degree: int, point) -> bool:
    return (metric.name == "zipoy-voorhees(delta=2)" and degree == 6
            and tuple(point[v] for v in metric.base_coords) == (Fraction(1, 2), Fraction(2)))


def reference_notes(metric: MetricSpec, degree: int, table: DeltaTable) -> List[str]:
    """Compare a computed table with the published one and describe mismatches."""
    if not _is_reference_case(metric, degree, table.point):
        return []
    notes = []
    computed = {r.n: (r.num_equations, r.dim_u, r.rank, r.delta) for r in table.rows}
    by_values = {v: n for n, v in computed.items()}
    base = table.rows[0]
    for label, *vals in REFERENCE_TABLES[table.parity]:
        vals = tuple(vals)
        if computed.get(label) == vals:
            continue
        if vals in by_values:
            eqs = base.num_equations * comb(label + 2, 2)
            jets = base.dim_u // 3 * comb(label + 3, 2)
            notes.append(f"published column labelled n={label} (#eqn, dim u, rank, Delta) = {vals} matches the "
                         f"computed level n={by_values[vals]}; at n={label} the counts are #eqn={eqs}, "
                         f"dim u={jets}")
        elif label in computed:
            notes.append(f"published column n={label} {vals} differs from the computed {computed[label]}")
    return notes
