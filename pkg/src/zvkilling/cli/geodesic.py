"""Floating-point geodesic integration, a non-rigorous wiring check.

Hamilton's equations are generated from the same exact Hamiltonian as
the PDE system and integrated with classical fixed-step RK4. The cyclic
momenta have zero right-hand side and are carried unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Sequence

from ..metric import MetricSpec, hamiltonian, invert
from ..ratexpr import Polynomial, RationalFunction

NON_RIGOROUS = "non-rigorous floating-point sanity check"


class GeodesicSingularityError(ArithmeticError):
    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


def _poly_source(p: Polynomial, names: Sequence[str]) -> str:
    p = p.with_variables(names)
    terms = []
    for exp, c in p.terms.items():
        factors = [repr(float(c))]
        for v, e in zip(names, exp):
            if e == 1:
                factors.append(v)
            elif e:
                factors.append(f"{v}**{e}")
        terms.append("*".join(factors))
    return " + ".join(terms) or "0.0"


def compile_float(f, names: Sequence[str]) -> Callable[..., float]:
    """Float evaluator ``fn(*coords)`` for a Polynomial or RationalFunction."""
    if isinstance(f, RationalFunction):
        src = f"({_poly_source(f.num, names)}) / ({_poly_source(f.den, names)})"
    else:
        src = _poly_source(f, names)
    return eval(f"lambda {', '.join(names)}: {src}", {"__builtins__": {}})


@dataclass
class GeodesicResult:
    steps: int
    step_size: float
    drift_H: float
    drift_momenta: Dict[str, float]
    final_state: Dict[str, float]
    label: str = NON_RIGOROUS

    def to_dict(self) -> dict:
        return {"label": self.label, "steps": self.steps, "step_size": self.step_size,
                "relative_drift_H": self.drift_H, "drift_cyclic_momenta": dict(self.drift_momenta),
                "final_state": dict(self.final_state)}


class HamiltonFlow:
    def __init__(self, metric: MetricSpec):
        self.metric = metric
        self.h = hamiltonian(invert(metric))
        self.base = metric.base_coords
        coords = metric.coords
        self.base_pos = [coords.index(v) for v in self.base]
        self.cyc_pos = [coords.index(v) for v in metric.cyclic]
        names = list(self.base)
        self.terms = []
        for exp, c in sorted(self.h.terms.items()):
            self.terms.append((exp, compile_float(c, names), compile_float(c.diff(names[0]), names),
                               compile_float(c.diff(names[1]), names)))
        self.forbidden = [compile_float(p, names) for p in metric.forbidden_polynomials()]

    def energy(self, q: Sequence[float], p: Sequence[float]) -> float:
        total = 0.0
        for exp, f, _, _ in self.terms:
            total += f(*q) * _mono(p, exp)
        return total

    def rhs(self, q: Sequence[float], p: Sequence[float]):
        """Returns (dq for the two base coordinates, dp for all four momenta)."""
        dq = [0.0, 0.0]
        dp = [0.0, 0.0, 0.0, 0.0]
        for exp, f, fx, fy in self.terms:
            c = f(*q)
            for k, pos in enumerate(self.base_pos):
                e = exp[pos]
                if e:
                    lowered = list(exp)
                    lowered[pos] -= 1
                    dq[k] += c * e * _mono(p, lowered)
            m = _mono(p, exp)
            dp[self.base_pos[0]] -= fx(*q) * m
            dp[self.base_pos[1]] -= fy(*q) * m
        return dq, dp

    def check(self, q: Sequence[float], step: int) -> None:
        for g in self.forbidden:
            v = g(*q)
            if not math.isfinite(v) or abs(v) < 1e-12:
                raise GeodesicSingularityError(
                    f"trajectory reached the singular locus at step {step} ({self.base[0]}={q[0]!r}, "
                    f"{self.base[1]}={q[1]!r})", step)


def _mono(p: Sequence[float], exp: Sequence[int]) -> float:
    out = 1.0
    for v, e in zip(p, exp):
        if e:
            out *= v ** e
    return out


def geodesic_sanity(metric: MetricSpec, position: Mapping[str, float], momenta: Mapping[str, float],
                    steps: int = 100_000, step_size: float = 1e-3) -> GeodesicResult:
    """Integrate Hamilton's equations with RK4 and report conservation drift.

    ``momenta`` maps momentum names (``p_x`` ...) to initial values.
    """
    flow = HamiltonFlow(metric)
    q = [float(position[v]) for v in flow.base]
    p = [float(momenta.get(name, 0.0)) for name in metric.momenta]
    p0 = list(p)
    flow.check(q, 0)
    H0 = flow.energy(q, p)
    scale = abs(H0) if H0 else 1.0
    worst = 0.0
    hs = step_size
    for step in range(1, steps + 1):
        k1q, k1p = flow.rhs(q, p)
        q2 = [q[i] + 0.5 * hs * k1q[i] for i in range(2)]
        p2 = [p[i] + 0.5 * hs * k1p[i] for i in range(4)]
        k2q, k2p = flow.rhs(q2, p2)
        q3 = [q[i] + 0.5 * hs * k2q[i] for i in range(2)]
        p3 = [p[i] + 0.5 * hs * k2p[i] for i in range(4)]
        k3q, k3p = flow.rhs(q3, p3)
        q4 = [q[i] + hs * k3q[i] for i in range(2)]
        p4 = [p[i] + hs * k3p[i] for i in range(4)]
        k4q, k4p = flow.rhs(q4, p4)
        q = [q[i] + hs / 6 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]) for i in range(2)]
        p = [p[i] + hs / 6 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]) for i in range(4)]
        flow.check(q, step)
        worst = max(worst, abs(flow.energy(q, p) - H0) / scale)
    drift_m = {metric.momenta[i]: abs(p[i] - p0[i]) for i in flow.cyc_pos}
    final = {v: q[k] for k, v in enumerate(flow.base)}
    final.update({name: p[i] for i, name in enumerate(metric.momenta)})
    return GeodesicResult(steps, step_size, worst, drift_m, final)


# Near-circular equatorial orbit of the delta = 2 metric, slightly perturbed;
# it stays in 10 < x < 14 for the default 10^5 steps.
DEFAULT_POSITION = {"x": 10.0, "y": 0.1}
DEFAULT_MOMENTA = {"p_x": 0.05, "p_y": 0.0, "p_phi": 7.432, "p_t": -1.0}
