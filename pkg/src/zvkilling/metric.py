"""Metrics with two cyclic coordinates, their inverses and Hamiltonians."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .ratexpr import Polynomial, RationalFunction, parse_rational_function
from .ratexpr.ratfunc import SingularPointError

Matrix = Tuple[Tuple[RationalFunction, ...], ...]


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricSpec:
    """A 4x4 symmetric metric whose entries depend on two coordinates."""

    coords: Tuple[str, ...]
    g_lower: Matrix
    cyclic: Tuple[str, str]
    singular_locus: Tuple[Polynomial, ...] = ()
    name: str = "custom"

    def __post_init__(self):
        if len(self.coords) != 4 or len(set(self.coords)) != 4:
            raise MetricError("a metric needs exactly 4 distinct coordinate names")
        if len(self.cyclic) != 2 or any(c not in self.coords for c in self.cyclic):
            raise MetricError("exactly two of the coordinates must be declared cyclic")
        for i in range(4):
            for j in range(4):
                if self.g_lower[i][j] != self.g_lower[j][i]:
                    raise MetricError(f"metric is not symmetric at ({i}, {j})")
        allowed = set(self.base_coords)
        for row in self.g_lower:
            for entry in row:
                used = set(entry.num.used_variables()) | set(entry.den.used_variables())
                if not used <= allowed:
                    raise MetricError(f"metric entry {entry} depends on cyclic coordinates")

    @property
    def base_coords(self) -> Tuple[str, str]:
        """The two non-cyclic coordinates, in declaration order."""
        return tuple(c for c in self.coords if c not in self.cyclic)

    @property
    def momenta(self) -> Tuple[str, ...]:
        return tuple(f"p_{c}" for c in self.coords)

    def is_diagonal(self) -> bool:
        return all(self.g_lower[i][j].is_zero() for i in range(4) for j in range(4) if i != j)

    def forbidden_polynomials(self) -> List[Polynomial]:
        """Declared singular-locus polynomials plus every entry denominator."""
        out = list(self.singular_locus)
        for row in self.g_lower:
            for entry in row:
                if not entry.den.is_constant():
                    out.append(entry.den)
        return out

    def check_point(self, point: Mapping[str, object]) -> None:
        for p in self.forbidden_polynomials():
            if p.evaluate(point) == 0:
                raise SingularPointError(f"point {_fmt_point(point)} lies on the singular locus ({p} = 0)", p)

    def fingerprint(self) -> str:
        """Stable hash of the metric content, used for cache keys."""
        h = hashlib.sha256()
        h.update(repr(self.coords).encode())
        h.update(repr(self.cyclic).encode())
        for row in self.g_lower:
            for entry in row:
                h.update(str(entry).encode() + b";")
        for p in self.singular_locus:
            h.update(str(p).encode() + b"|")
        return h.hexdigest()[:16]


def _fmt_point(point: Mapping[str, object]) -> str:
    return "(" + ", ".join(f"{k}={v}" for k, v in point.items()) + ")"


@dataclass(frozen=True)
class InverseMetric:
    metric: MetricSpec
    g_upper: Matrix


@dataclass(frozen=True)
class Hamiltonian:
    """``H = 1/2 g^{ij} p_i p_j`` as ``{momentum exponent: coefficient}``."""

    metric: MetricSpec
    terms: Dict[Tuple[int, int, int, int], RationalFunction] = field(hash=False)

    @property
    def variables(self) -> Tuple[str, str]:
        return self.metric.base_coords

    def coefficient(self, exp) -> RationalFunction:
        return self.terms.get(tuple(exp), RationalFunction.constant(self.variables, 0))

    def is_parity_even(self) -> bool:
        """True if every monomial has even degree in the two cyclic momenta."""
        cyc = [self.metric.coords.index(c) for c in self.metric.cyclic]
        return all(sum(exp[i] for i in cyc) % 2 == 0 for exp in self.terms)

    def evaluate(self, position: Mapping[str, object], momenta: Sequence) -> Fraction:
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c.evaluate(position)
            for p, e in zip(momenta, exp):
                if e:
                    term *= Fraction(p) ** e
            total += term
        return total


# ----------------------------------------------------------------------------


def zipoy_voorhees(delta: int, coords: Sequence[str] = ("x", "y", "phi", "t")) -> MetricSpec:
    """The static axisymmetric Zipoy-Voorhees metric for integer ``delta >= 0``.

    delta=0 is flat space, delta=1 Schwarzschild.
    """
    if isinstance(delta, bool) or not isinstance(delta, int):
        if isinstance(delta, Fraction) and delta.denominator == 1:
            delta = int(delta)
        else:
            raise MetricError(f"delta must be a non-negative integer, got {delta!r}")
    if delta < 0:
        raise MetricError(f"delta must be non-negative (use the x -> -x symmetry), got {delta}")
    x, y, phi, t = coords
    V = (x, y)
    expr = parse_rational_function
    conf = expr(f"(({x}+1)/({x}-1))^{delta}", V)
    shape = expr(f"({x}^2-{y}^2)*(({x}^2-1)/({x}^2-{y}^2))^{delta * delta}", V)
    zero = RationalFunction.constant(V, 0)
    g_xx = conf * shape / expr(f"{x}^2-1", V)
    g_yy = conf * shape / expr(f"1-{y}^2", V)
    g_pp = conf * expr(f"({x}^2-1)*(1-{y}^2)", V)
    g_tt = -conf.inverse()
    diag = [g_xx, g_yy, g_pp, g_tt]
    g = tuple(tuple(diag[i] if i == j else zero for j in range(4)) for i in range(4))
    locus = tuple(expr(s, V).num for s in (f"{x}-1", f"{x}+1", f"{y}-1", f"{y}+1", f"{x}-{y}", f"{x}+{y}"))
    return MetricSpec(coords=tuple(coords), g_lower=g, cyclic=(phi, t), singular_locus=locus,
                      name=f"zipoy-voorhees(delta={delta})")


def _det(m: List[List[RationalFunction]]) -> RationalFunction:
    n = len(m)
    if n == 1:
        return m[0][0]
    # expand along the row with most zeros
    row = min(range(n), key=lambda r: sum(1 for e in m[r] if not e.is_zero()))
    total = None
    for j, a in enumerate(m[row]):
        if a.is_zero():
            continue
        minor = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != row]
        term = a * _det(minor)
        if (row + j) % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] * 0


def invert(m: MetricSpec) -> InverseMetric:
    """Exact inverse via adjugate over the rational-function field."""
    g = [list(r) for r in m.g_lower]
    V = m.base_coords
    zero = RationalFunction.constant(V, 0)
    if m.is_diagonal():
        diag = []
        for i in range(4):
            if g[i][i].is_zero():
                raise MetricError("metric determinant is identically zero")
            diag.append(g[i][i].inverse())
        up = tuple(tuple(diag[i] if i == j else zero for j in range(4)) for i in range(4))
        return InverseMetric(m, up)
    det = _det(g)
    if det.is_zero():
        raise MetricError("metric determinant is identically zero")
    inv_det = det.inverse()
    up = [[zero] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i, 4):
            minor = [[g[r][c] for c in range(4) if c != i] for r in range(4) if r != j]
            cof = _det(minor)
            if (i + j) % 2:
                cof = -cof
            up[i][j] = up[j][i] = cof * inv_det
    return InverseMetric(m, tuple(tuple(r) for r in up))


def inverse_as_metric(inv: InverseMetric) -> MetricSpec:
    """Treat ``g^{ij}`` as a metric in its own right (used for the involution check)."""
    m = inv.metric
    return MetricSpec(coords=m.coords, g_lower=inv.g_upper, cyclic=m.cyclic,
                      singular_locus=m.singular_locus, name=f"inverse of {m.name}")


def hamiltonian(inv: InverseMetric) -> Hamiltonian:
    terms = {}
    for i in range(4):
        for j in range(i, 4):
            c = inv.g_upper[i][j]
            if c.is_zero():
                continue
            exp = [0, 0, 0, 0]
            exp[i] += 1
            exp[j] += 1
            terms[tuple(exp)] = c * Fraction(1, 2) if i == j else c
    return Hamiltonian(inv.metric, terms)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = None
            for k in range(n):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                t = a[i][k] * b[k][j]
                s = t if s is None else s + t
            row.append(s if s is not None else a[0][0] * 0)
        out.append(tuple(row))
    return tuple(out)


# --- metric definition files -------------------------------------------------


def parse_metric_text(text: str, name: str = "custom") -> MetricSpec:
    """Read the line-oriented metric format.

    ``coords: x y phi t`` / ``cyclic: phi t`` / ``g 0 0 = <expr>`` /
    ``forbid = <expr>``. Lines starting with ``#`` are comments.
    """
    coords: Optional[List[str]] = None
    cyclic: Optional[List[str]] = None
    entries: Dict[Tuple[int, int], Tuple[str, int]] = {}
    forbid: List[Tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("coords:"):
            coords = line[len("coords:"):].split()
        elif line.startswith("cyclic:"):
            cyclic = line[len("cyclic:"):].split()
        elif line.startswith("forbid"):
            _, _, rhs = line.partition("=")
            forbid.append((rhs.strip(), lineno))
        elif line.startswith("g"):
            lhs, eq, rhs = line.partition("=")
            parts = lhs.split()
            if not eq or len(parts) != 3 or parts[0] != "g":
                raise MetricError(f"line {lineno}: expected 'g <i> <j> = <expression>'")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise MetricError(f"line {lineno}: indices must be integers") from None
            if not (0 <= i < 4 and 0 <= j < 4):
                raise MetricError(f"line {lineno}: index out of range")
            key = (min(i, j), max(i, j))
            if key in entries:
                raise MetricError(f"line {lineno}: entry g {key[0]} {key[1]} given twice")
            entries[key] = (rhs.strip(), lineno)
        else:
            raise MetricError(f"line {lineno}: cannot parse {raw!r}")
    if coords is None or len(coords) != 4:
        raise MetricError("missing or malformed 'coords:' line (need 4 names)")
    if cyclic is None or len(cyclic) != 2:
        raise MetricError("missing or malformed 'cyclic:' line (need 2 names)")
    base = tuple(c for c in coords if c not in cyclic)
    zero = RationalFunction.constant(base, 0)
    g = [[zero] * 4 for _ in range(4)]
    for (i, j), (src, lineno) in entries.items():
        try:
            f = parse_rational_function(src, base)
        except ValueError as exc:
            raise MetricError(f"line {lineno}: {exc}") from exc
        g[i][j] = g[j][i] = f
    locus = []
    for src, lineno in forbid:
        try:
            f = parse_rational_function(src, base)
        except ValueError as exc:
            raise MetricError(f"line {lineno}: {exc}") from exc
        locus.append(f.num)
        if not f.den.is_constant():
            locus.append(f.den)
    spec = MetricSpec(coords=tuple(coords), g_lower=tuple(tuple(r) for r in g), cyclic=tuple(cyclic),
                      singular_locus=tuple(locus), name=name)
    if _det([list(r) for r in spec.g_lower]).is_zero():
        raise MetricError("metric determinant is identically zero")
    return spec


def load_metric_file(path) -> MetricSpec:
    path = Path(path)
    return parse_metric_text(path.read_text(), name=path.name)


def metric_to_text(m: MetricSpec) -> str:
    lines = [f"coords: {' '.join(m.coords)}", f"cyclic: {' '.join(m.cyclic)}"]
    for i in range(4):
        for j in range(i, 4):
            if not m.g_lower[i][j].is_zero():
                lines.append(f"g {i} {j} = {m.g_lower[i][j]}")
    for p in m.singular_locus:
        lines.append(f"forbid = {p}")
    return "\n".join(lines) + "\n"
