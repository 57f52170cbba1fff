"""The linear first-order PDE system imposed by {H, I} = 0.

The integral is a homogeneous momentum polynomial whose coefficients
``I_ijkm`` depend on the two non-cyclic coordinates only. Each momentum
monomial of ``{H, I}`` gives one equation, linear in the unknowns and
their first derivatives.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

from .metric import Hamiltonian
from .ratexpr import RationalFunction

log = logging.getLogger(__name__)

MAX_DEGREE = 8

Exp = Tuple[int, ...]
MultiIndex = Tuple[int, int]

VALUE: MultiIndex = (0, 0)
DX: MultiIndex = (1, 0)
DY: MultiIndex = (0, 1)


class ParityMixingError(ValueError):
    """An equation couples unknowns of different (p_phi, p_t) parity."""


class DegreeTooLargeError(ValueError):
    pass


def monomials(degree: int, nvars: int = 4) -> List[Exp]:
    """All exponent vectors of the given total degree, lex-descending."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(degree - first, nvars - 1):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True, order=True)
class Unknown:
    """The coefficient ``I_ijkm`` of ``p^index`` in the ansatz."""

    index: Exp
    parity: str

    @property
    def name(self) -> str:
        if all(e < 10 for e in self.index):
            return "I_" + "".join(str(e) for e in self.index)
        return "I_" + "_".join(str(e) for e in self.index)


def _parity(exp: Exp, cyclic_positions: Sequence[int]) -> str:
    return "odd" if sum(exp[i] for i in cyclic_positions) % 2 else "even"


def enumerate_ansatz(degree: int, cyclic_positions: Sequence[int] = (2, 3)) -> List[Unknown]:
    if degree < 1:
        raise ValueError("ansatz degree must be at least 1")
    return [Unknown(e, _parity(e, cyclic_positions)) for e in monomials(degree)]


@dataclass(frozen=True)
class PDETerm:
    unknown: Unknown
    derivative: MultiIndex
    coefficient: RationalFunction


@dataclass(frozen=True)
class Equation:
    tag: Exp
    terms: Tuple[PDETerm, ...]

    def is_trivial(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class LinearPDESystem:
    variables: Tuple[str, str]
    momenta: Tuple[str, ...]
    degree: int
    unknowns: Tuple[Unknown, ...]
    equations: Tuple[Equation, ...]
    parity: str
    cyclic_positions: Tuple[int, int] = (2, 3)

    def unknown_position(self) -> Dict[Unknown, int]:
        return {u: i for i, u in enumerate(self.unknowns)}

    def __len__(self):
        return len(self.equations)


def _check_degree(degree: int, max_degree: int) -> None:
    if degree < 1:
        raise ValueError("ansatz degree must be at least 1")
    if degree > max_degree:
        raise DegreeTooLargeError(
            f"degree {degree} exceeds the configured cap {max_degree}; "
            f"the prolonged matrices would have about {estimate_matrix_size(degree, degree)} entries")


def estimate_matrix_size(degree: int, n: int) -> int:
    """Rough dense size of the largest assembled matrix for one parity."""
    rows = comb(degree + 4, 3) // 2 * comb(n + 2, 2)
    cols = comb(degree + 3, 3) // 2 * comb(n + 3, 2)
    return rows * cols


def poisson_bracket_system(h: Hamiltonian, degree: int, max_degree: int = MAX_DEGREE) -> LinearPDESystem:
    """Expand ``{H, I}`` for the degree-``degree`` ansatz into equations.

    ``{H, I} = sum_v (dH/dv dI/dp_v - dI/dv dH/dp_v)`` over the two
    non-cyclic coordinates ``v``.
    """
    _check_degree(degree, max_degree)
    metric = h.metric
    coords = metric.coords
    base = metric.base_coords
    base_pos = [coords.index(v) for v in base]
    cyc_pos = tuple(coords.index(c) for c in metric.cyclic)
    for exp, c in h.terms.items():
        used = set(c.num.used_variables()) | set(c.den.used_variables())
        if not used <= set(base):
            raise ValueError(f"Hamiltonian coefficient of {exp} depends on cyclic coordinates")
    log.info("building {H, I} system: degree %d, %d unknowns, %d equations",
             degree, comb(degree + 3, 3), comb(degree + 4, 3))
    unknowns = enumerate_ansatz(degree, cyc_pos)
    dH = {v: {exp: c.diff(v) for exp, c in h.terms.items()} for v in base}
    derivs = {base[0]: DX, base[1]: DY}

    acc: Dict[Exp, Dict[Tuple[Unknown, MultiIndex], RationalFunction]] = defaultdict(dict)

    def add(tag, key, coef):
        if coef.is_zero():
            return
        slot = acc[tag]
        if key in slot:
            s = slot[key] + coef
            if s.is_zero():
                del slot[key]
            else:
                slot[key] = s
        else:
            slot[key] = coef

    for u in unknowns:
        alpha = u.index
        for v, pv in zip(base, base_pos):
            av = alpha[pv]
            if av:
                # dH/dv * dI/dp_v
                lowered = alpha[:pv] + (av - 1,) + alpha[pv + 1:]
                for exp, c in dH[v].items():
                    if c.is_zero():
                        continue
                    tag = tuple(a + b for a, b in zip(lowered, exp))
                    add(tag, (u, VALUE), c * av)
            # -dI/dv * dH/dp_v
            for exp, c in h.terms.items():
                ev = exp[pv]
                if not ev:
                    continue
                dexp = exp[:pv] + (ev - 1,) + exp[pv + 1:]
                tag = tuple(a + b for a, b in zip(alpha, dexp))
                add(tag, (u, derivs[v]), c * (-ev))

    order = {u: i for i, u in enumerate(unknowns)}
    deriv_order = {VALUE: 0, DX: 1, DY: 2}
    equations = []
    for tag in monomials(degree + 1):
        slot = acc.get(tag, {})
        keys = sorted(slot, key=lambda k: (order[k[0]], deriv_order[k[1]]))
        equations.append(Equation(tag, tuple(PDETerm(k[0], k[1], slot[k]) for k in keys)))
    extra = set(acc) - set(monomials(degree + 1))
    assert not extra, extra
    return LinearPDESystem(variables=tuple(base), momenta=metric.momenta, degree=degree,
                           unknowns=tuple(unknowns), equations=tuple(equations), parity="mixed",
                           cyclic_positions=cyc_pos)


def equation_parity(eq: Equation, cyclic_positions: Sequence[int]) -> str:
    return _parity(eq.tag, cyclic_positions)


def split_parity(s: LinearPDESystem) -> Tuple[LinearPDESystem, LinearPDESystem]:
    """Partition ``s`` into its odd and even subsystems."""
    out = {}
    for parity in ("odd", "even"):
        eqs = []
        for eq in s.equations:
            # {H, I_odd} has odd degree in the cyclic momenta when H is even in them
            if equation_parity(eq, s.cyclic_positions) != parity:
                continue
            for t in eq.terms:
                if t.unknown.parity != parity:
                    raise ParityMixingError(
                        f"equation {format_monomial(eq.tag, s.momenta)} ({parity}) involves "
                        f"{t.unknown.name} ({t.unknown.parity}); the metric is not block diagonal")
            eqs.append(eq)
        unknowns = tuple(u for u in s.unknowns if u.parity == parity)
        out[parity] = LinearPDESystem(variables=s.variables, momenta=s.momenta, degree=s.degree,
                                      unknowns=unknowns, equations=tuple(eqs), parity=parity,
                                      cyclic_positions=s.cyclic_positions)
    return out["odd"], out["even"]


def build_system(h: Hamiltonian, degree: int, parity: str = "mixed",
                 max_degree: int = MAX_DEGREE) -> LinearPDESystem:
    s = poisson_bracket_system(h, degree, max_degree)
    if parity == "mixed":
        return s
    if not h.is_parity_even():
        raise ParityMixingError("the Hamiltonian mixes cyclic and non-cyclic momenta; cannot split by parity")
    odd, even = split_parity(s)
    return odd if parity == "odd" else even


# --- substitution checks -----------------------------------------------------


def substitute(s: LinearPDESystem, solution: Mapping[Unknown, RationalFunction]) -> List[RationalFunction]:
    """Residual of every equation with the unknowns replaced by functions."""
    zero = RationalFunction.constant(s.variables, 0)
    cache: Dict[Tuple[Unknown, MultiIndex], RationalFunction] = {}

    def value(u, d):
        key = (u, d)
        if key not in cache:
            f = solution.get(u, zero)
            if d == DX:
                f = f.diff(s.variables[0])
            elif d == DY:
                f = f.diff(s.variables[1])
            cache[key] = f
        return cache[key]

    out = []
    for eq in s.equations:
        total = zero
        for t in eq.terms:
            f = value(t.unknown, t.derivative)
            if not f.is_zero():
                total = total + t.coefficient * f
        out.append(total)
    return out


# --- text dump ---------------------------------------------------------------


def format_monomial(exp: Exp, momenta: Sequence[str]) -> str:
    parts = []
    for p, e in zip(momenta, exp):
        if e == 1:
            parts.append(p)
        elif e > 1:
            parts.append(f"{p}^{e}")
    return "*".join(parts) or "1"


def _term_text(t: PDETerm, variables) -> str:
    if t.derivative == VALUE:
        target = t.unknown.name
    else:
        v = variables[0] if t.derivative == DX else variables[1]
        target = f"D_{v}({t.unknown.name})"
    return f"({t.coefficient})*{target}"


def dump_system(s: LinearPDESystem) -> str:
    """One line per equation: ``[monomial] coeff*D(I_ijkm) + ...``."""
    lines = []
    for eq in s.equations:
        body = " + ".join(_term_text(t, s.variables) for t in eq.terms) or "0"
        lines.append(f"[{format_monomial(eq.tag, s.momenta)}] {body}")
    return "\n".join(lines) + "\n"


def iter_terms(s: LinearPDESystem) -> Iterator[Tuple[int, PDETerm]]:
    for i, eq in enumerate(s.equations):
        for t in eq.terms:
            yield i, t
