"""Exact rank and kernel of sparse rational matrices.

Two routes are provided:

* :func:`rank_exact` -- fraction-free integer elimination on sparse rows
  (each row is kept primitive) with a Markowitz-style pivot choice.
* :func:`rank_modular` -- Gaussian elimination over GF(p). Primes below
  2**31 run on dense int64 numpy arrays; larger primes use sparse Python
  integers.

``rank(mod p) <= rank(Q)`` always holds, so a modular rank is a lower
bound. :func:`certify_rank` turns it into an exact value when the lower
bound meets an upper bound: the row count, or ``cols - d`` with ``d``
independent kernel vectors verified over Q.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import gmpy2
import numpy as np

log = logging.getLogger(__name__)

DEFAULT_PRIME_BITS = 31
_NUMPY_PRIME_LIMIT = 2 ** 31


class MatrixFormatError(ValueError):
    pass


class PrimeSelectionError(ValueError):
    pass


@dataclass
class SparseRationalMatrix:
    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry ({r}, {c}) outside a {self.rows}x{self.cols} matrix")
            v = Fraction(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseRationalMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v})

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, object]], cols: int) -> "SparseRationalMatrix":
        return cls(len(rows), cols, {(i, j): v for i, row in enumerate(rows) for j, v in row.items()})

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        out: List[Dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def integer_rows(self) -> List[Dict[int, int]]:
        """Rows scaled by their denominator lcm and divided by their content."""
        out = []
        for row in self.row_dicts():
            if not row:
                out.append({})
                continue
            d = lcm(*(v.denominator for v in row.values()))
            ints = {c: (v * d).numerator for c, v in row.items()}
            g = gcd(*ints.values())
            out.append({c: v // g for c, v in ints.items()} if g > 1 else ints)
        return out

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseRationalMatrix":
        return SparseRationalMatrix(self.rows, self.cols,
                                    {(row_perm[r], col_perm[c]): v for (r, c), v in self.entries.items()})

    def matvec(self, v: Sequence) -> List[Fraction]:
        out = [Fraction(0)] * self.rows
        for (r, c), a in self.entries.items():
            x = v[c]
            if x:
                out[r] += a * x
        return out

    def annihilates(self, v: Sequence) -> bool:
        return not any(self.matvec(v))

    def __eq__(self, other):
        if not isinstance(other, SparseRationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)


@dataclass
class RankResult:
    rank: int
    method: str
    primes_used: List[int] = field(default_factory=list)
    certified_exact: bool = False
    certificate: str = ""
    modular_ranks: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "method": self.method, "primes": list(self.primes_used),
                "certified_exact": self.certified_exact, "certificate": self.certificate}


# --- exact elimination -------------------------------------------------------


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = gcd(*row.values())
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _eliminate_integer(rows: List[Dict[int, int]], want_pivots: bool = False):
    """Fraction-free sparse elimination; returns (rank, pivot rows in order)."""
    active: Dict[int, Dict[int, int]] = {i: r for i, r in enumerate(rows) if r}
    col_rows: Dict[int, set] = {}
    for i, r in active.items():
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    pivots = []
    rank = 0
    while active:
        # Markowitz-lite: sparsest column, then sparsest row, then smallest entry
        c = min((c for c, s in col_rows.items() if s), key=lambda c: (len(col_rows[c]), c), default=None)
        if c is None:
            break
        cand = col_rows[c]
        pi = min(cand, key=lambda i: (len(active[i]), active[i][c].bit_length(), i))
        prow = active.pop(pi)
        for cc in prow:
            col_rows[cc].discard(pi)
        pv = prow[c]
        for i in list(col_rows[c]):
            row = active[i]
            a = row[c]
            g = gcd(pv, a)
            mp, ma = pv // g, a // g
            new = {}
            for cc, v in row.items():
                new[cc] = v * mp
            for cc, v in prow.items():
                s = new.get(cc, 0) - v * ma
                if s:
                    new[cc] = s
                else:
                    new.pop(cc, None)
            for cc in row:
                if cc not in new:
                    col_rows[cc].discard(i)
            for cc in new:
                col_rows.setdefault(cc, set()).add(i)
            if new:
                active[i] = _primitive(new)
            else:
                del active[i]
        col_rows.pop(c, None)
        rank += 1
        if want_pivots:
            pivots.append((c, prow))
    return rank, pivots


def rank_exact(m: SparseRationalMatrix) -> RankResult:
    """Rank over Q by fraction-free elimination."""
    if m.rows == 0 or m.cols == 0:
        return RankResult(0, "bareiss", certified_exact=True, certificate="exact elimination")
    r, _ = _eliminate_integer(m.integer_rows())
    return RankResult(r, "bareiss", certified_exact=True, certificate="exact elimination")


def _axpy(row: Dict[int, Fraction], f: Fraction, other: Mapping[int, Fraction]) -> None:
    """``row -= f * other`` in place, dropping zeros."""
    for c, v in other.items():
        s = row.get(c, 0) - f * v
        if s:
            row[c] = s
        else:
            row.pop(c, None)


def rref_rational(m: SparseRationalMatrix) -> Tuple[List[int], Dict[int, Dict[int, Fraction]]]:
    """Reduced row echelon form over Q; returns (pivot columns, pivot col -> row)."""
    pivot_rows: Dict[int, Dict[int, Fraction]] = {}
    for row in m.row_dicts():
        if not row:
            continue
        # pivot rows are fully reduced, so one pass clears every pivot column
        for pc in [c for c in row if c in pivot_rows]:
            _axpy(row, row[pc], pivot_rows[pc])
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {c: v * inv for c, v in row.items()}
        for orow in pivot_rows.values():
            if pc in orow:
                _axpy(orow, orow[pc], row)
        pivot_rows[pc] = row
    return sorted(pivot_rows), pivot_rows


def kernel_basis(m: SparseRationalMatrix) -> List[List[Fraction]]:
    """Exact basis of the right null space (one vector per free column)."""
    pivots, prow = rref_rational(m)
    free = [c for c in range(m.cols) if c not in prow]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for pc in pivots:
            a = prow[pc].get(f)
            if a:
                v[pc] = -a
        basis.append(v)
    return basis


# --- modular elimination ----------------------------------------------------


def random_prime(bits: int = DEFAULT_PRIME_BITS, rng: Optional[random.Random] = None) -> int:
    rng = rng or random.Random()
    if bits < 17:
        raise PrimeSelectionError("primes must exceed 2**16")
    while True:
        start = rng.getrandbits(bits) | (1 << (bits - 1))
        p = int(gmpy2.next_prime(start))
        if p.bit_length() == bits:
            return p


def draw_primes(count: int, bits: int = DEFAULT_PRIME_BITS, seed: int = 0) -> List[int]:
    rng = random.Random(seed)
    out: List[int] = []
    while len(out) < count:
        p = random_prime(bits, rng)
        if p not in out:
            out.append(p)
    return out


def _reduce_mod(m: SparseRationalMatrix, p: int) -> Optional[Dict[Tuple[int, int], int]]:
    out = {}
    inv_cache: Dict[int, int] = {}
    for key, v in m.entries.items():
        d = v.denominator
        if d % p == 0:
            return None
        if d == 1:
            x = v.numerator % p
        else:
            if d not in inv_cache:
                inv_cache[d] = pow(d, -1, p)
            x = v.numerator * inv_cache[d] % p
        if x:
            out[key] = x
    return out


def _rank_mod_numpy(rows: int, cols: int, entries: Dict[Tuple[int, int], int], p: int) -> int:
    a = np.zeros((rows, cols), dtype=np.int64)
    for (r, c), v in entries.items():
        a[r, c] = v
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        col = a[rank:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, p)
        prow = a[rank, c:] * inv % p
        a[rank, c:] = prow
        below = rank + 1 + np.flatnonzero(a[rank + 1:, c])
        if below.size:
            f = a[below, c]
            a[below, c:] = (a[below, c:] - f[:, None] * prow[None, :]) % p
        rank += 1
    return rank


def _rank_mod_sparse(rows: int, entries: Dict[Tuple[int, int], int], p: int) -> int:
    row_dicts: Dict[int, Dict[int, int]] = {}
    for (r, c), v in entries.items():
        row_dicts.setdefault(r, {})[c] = v
    pivots: Dict[int, Dict[int, int]] = {}
    rank = 0
    for r in sorted(row_dicts):
        row = row_dicts[r]
        while row:
            c = min(row)
            if c not in pivots:
                inv = pow(row[c], -1, p)
                pivots[c] = {cc: v * inv % p for cc, v in row.items()}
                rank += 1
                break
            f = row[c]
            for cc, v in pivots[c].items():
                s = (row.get(cc, 0) - f * v) % p
                if s:
                    row[cc] = s
                else:
                    row.pop(cc, None)
    return rank


def rank_mod_p(m: SparseRationalMatrix, p: int) -> int:
    """Rank of ``m`` over GF(p); ``p`` must not divide any denominator."""
    if p < 2 ** 16:
        raise PrimeSelectionError(f"prime {p} is below 2**16")
    red = _reduce_mod(m, p)
    if red is None:
        raise PrimeSelectionError(f"prime {p} divides an entry denominator")
    if m.rows == 0 or m.cols == 0:
        return 0
    if p < _NUMPY_PRIME_LIMIT:
        return _rank_mod_numpy(m.rows, m.cols, red, p)
    return _rank_mod_sparse(m.rows, red, p)


def rank_modular(m: SparseRationalMatrix, primes: Optional[Sequence[int]] = None, count: int = 2,
                 bits: int = DEFAULT_PRIME_BITS, seed: int = 0) -> RankResult:
    """Rank over GF(p) for several primes; the reported rank is the maximum.

    Primes dividing a denominator are skipped (and replaced when drawn at
    random). The result is certified only if the rank equals the row or
    column count; use :func:`certify_rank` for the kernel certificate.
    """
    used: List[int] = []
    ranks: List[int] = []
    if primes is not None:
        candidates = list(primes)
        for p in candidates:
            if _reduce_mod(m, p) is None:
                log.warning("skipping prime %d: divides a denominator", p)
                continue
            used.append(p)
            ranks.append(rank_mod_p(m, p))
        if not used:
            raise PrimeSelectionError("every candidate prime divides some denominator")
    else:
        rng = random.Random(seed)
        tries = 0
        while len(used) < count:
            p = random_prime(bits, rng)
            tries += 1
            if p in used:
                continue
            if _reduce_mod(m, p) is None:
                if tries > 100 * count:
                    raise PrimeSelectionError("could not find primes coprime to the denominators")
                continue
            used.append(p)
            ranks.append(rank_mod_p(m, p))
    r = max(ranks)
    res = RankResult(r, "modular", primes_used=used, modular_ranks=ranks)
    if len(set(ranks)) > 1:
        log.info("modular ranks disagree across primes: %s", ranks)
    _certify_by_shape(m, res)
    return res


def _certify_by_shape(m: SparseRationalMatrix, res: RankResult) -> None:
    if res.rank == m.rows:
        res.certified_exact = True
        res.certificate = "full row rank mod p"
    elif res.rank == m.cols:
        res.certified_exact = True
        res.certificate = "full column rank mod p"


def certify_rank(m: SparseRationalMatrix, res: RankResult,
                 kernel_vectors: Sequence[Sequence[Fraction]] = ()) -> RankResult:
    """Apply the kernel certificate to a modular rank.

    If ``rank(mod p) = cols - d`` and ``d`` linearly independent vectors
    are verified to satisfy ``m v = 0`` over Q, the exact rank is
    ``cols - d``.
    """
    if res.certified_exact:
        return res
    d = m.cols - res.rank
    if d <= 0 or not kernel_vectors:
        return res
    verified = [v for v in kernel_vectors if m.annihilates(v)]
    if len(verified) < len(kernel_vectors):
        log.warning("%d claimed kernel vectors are not annihilated", len(kernel_vectors) - len(verified))
    if len(verified) < d:
        return res
    stack = SparseRationalMatrix.from_dense(verified)
    if rank_exact(stack).rank >= d:
        res.certified_exact = True
        res.certificate = f"rank mod p = cols - {d} with {d} verified independent kernel vectors"
    return res


def compute_rank(m: SparseRationalMatrix, method: str = "modular", primes: Optional[Sequence[int]] = None,
                 count: int = 2, seed: int = 0, kernel_vectors: Sequence = ()) -> RankResult:
    """Dispatch on ``method`` in {exact, modular, both}."""
    if method == "exact":
        return rank_exact(m)
    if method not in ("modular", "both"):
        raise ValueError(f"unknown rank method {method!r}")
    res = rank_modular(m, primes=primes, count=count, seed=seed)
    certify_rank(m, res, kernel_vectors)
    if method == "both":
        ex = rank_exact(m)
        if ex.rank != res.rank:
            raise ArithmeticError(f"exact rank {ex.rank} disagrees with modular rank {res.rank}")
        res = RankResult(ex.rank, "both", primes_used=res.primes_used, certified_exact=True,
                         certificate="exact elimination agrees with modular rank",
                         modular_ranks=res.modular_ranks)
    return res


# --- sparse triplet format ----------------------------------------------------


def dumps_triplets(m: SparseRationalMatrix) -> str:
    lines = [f"{m.rows} {m.cols} {m.nnz}"]
    for (r, c) in sorted(m.entries):
        v = m.entries[(r, c)]
        lines.append(f"{r} {c} {v.numerator}/{v.denominator}")
    return "\n".join(lines) + "\n"


def loads_triplets(text: str) -> SparseRationalMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    try:
        rows, cols, nnz = (int(x) for x in lines[0].split())
    except ValueError:
        raise MatrixFormatError(f"bad header {lines[0]!r}") from None
    if len(lines) - 1 != nnz:
        raise MatrixFormatError(f"header announces {nnz} entries, found {len(lines) - 1}")
    entries = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise MatrixFormatError(f"bad entry line {ln!r}")
        r, c = int(parts[0]), int(parts[1])
        entries[(r, c)] = Fraction(parts[2])
    return SparseRationalMatrix(rows, cols, entries)


def write_triplets(m: SparseRationalMatrix, path) -> None:
    Path(path).write_text(dumps_triplets(m))


def read_triplets(path) -> SparseRationalMatrix:
    return loads_triplets(Path(path).read_text())


def vectors_rank(vectors: Iterable[Sequence[Fraction]]) -> int:
    vecs = list(vectors)
    if not vecs:
        return 0
    return rank_exact(SparseRationalMatrix.from_dense(vecs)).rank
