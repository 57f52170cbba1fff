"""Multivariate GCD over the integers.

Polynomials here are plain ``{exponent tuple: int}`` dicts over a fixed
number of variables. ``poly_gcd`` first tries the heuristic GCD: evaluate
the last variable at a large integer, take the GCD of the images
recursively and read the candidate back off its balanced base-xi digits.
A candidate is accepted only if it divides both inputs exactly. If a few
evaluation points fail, a primitive pseudo-remainder sequence takes over.
"""

from __future__ import annotations

from math import gcd as igcd
from typing import Dict, Tuple

IntPoly = Dict[Tuple[int, ...], int]


def _key(exp):
    return (sum(exp), exp)


def leading(p: IntPoly) -> Tuple[Tuple[int, ...], int]:
    exp = max(p, key=_key)
    return exp, p[exp]


def is_constant(p: IntPoly) -> bool:
    return all(not any(e) for e in p)


def add(p: IntPoly, q: IntPoly) -> IntPoly:
    out = dict(p)
    for e, c in q.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def scale(p: IntPoly, c: int) -> IntPoly:
    if not c:
        return {}
    return {e: v * c for e, v in p.items()}


def mul(p: IntPoly, q: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def shift(p: IntPoly, var: int, k: int) -> IntPoly:
    return {e[:var] + (e[var] + k,) + e[var + 1:]: c for e, c in p.items()}


def divide_exact(p: IntPoly, q: IntPoly) -> IntPoly:
    """Return ``p / q``; raise ``ArithmeticError`` if the division is not exact."""
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    if is_constant(q):
        c = next(iter(q.values()))
        out = {}
        for e, v in p.items():
            qq, r = divmod(v, c)
            if r:
                raise ArithmeticError("inexact division")
            out[e] = qq
        return out
    lq_exp, lq_c = leading(q)
    rem = dict(p)
    quot: IntPoly = {}
    while rem:
        le, lc = leading(rem)
        d = tuple(a - b for a, b in zip(le, lq_exp))
        if any(x < 0 for x in d):
            raise ArithmeticError("inexact division")
        t, r = divmod(lc, lq_c)
        if r:
            raise ArithmeticError("inexact division")
        quot[d] = t
        for e, c in q.items():
            ee = tuple(a + b for a, b in zip(e, d))
            s = rem.get(ee, 0) - t * c
            if s:
                rem[ee] = s
            else:
                rem.pop(ee, None)
    return quot


def _coeffs_in(p: IntPoly, var: int) -> Dict[int, IntPoly]:
    """Split ``p`` as a polynomial in variable ``var``."""
    out: Dict[int, IntPoly] = {}
    for e, c in p.items():
        k = e[var]
        out.setdefault(k, {})[e[:var] + (0,) + e[var + 1:]] = c
    return out


def _normalize_sign(p: IntPoly) -> IntPoly:
    if p and leading(p)[1] < 0:
        return {e: -c for e, c in p.items()}
    return p


def content_in(p: IntPoly, var: int, nvars: int) -> IntPoly:
    coeffs = list(_coeffs_in(p, var).values())
    # cheapest coefficients first so the running gcd collapses early
    coeffs.sort(key=len)
    g = coeffs[0]
    for c in coeffs[1:]:
        if is_constant(g) and abs(next(iter(g.values()))) == 1:
            break
        g = poly_gcd(g, c, nvars)
    return _normalize_sign(g)


def _prem(a: IntPoly, b: IntPoly, var: int) -> IntPoly:
    """Pseudo-remainder of ``a`` by ``b`` in variable ``var``."""
    bc = _coeffs_in(b, var)
    db = max(bc)
    lb = bc[db]
    r = a
    while r:
        rc = _coeffs_in(r, var)
        dr = max(rc)
        if dr < db:
            break
        lr = rc[dr]
        r = add(mul(r, lb), scale(mul(shift(b, var, dr - db), lr), -1))
    return r


def _int_content(p: IntPoly) -> int:
    return igcd(*p.values()) if p else 0


def _max_norm(p: IntPoly) -> int:
    return max(abs(c) for c in p.values())


def _eval_last(p: IntPoly, xi: int) -> IntPoly:
    out: IntPoly = {}
    for e, c in p.items():
        k = e[:-1]
        out[k] = out.get(k, 0) + c * xi ** e[-1]
    return {k: c for k, c in out.items() if c}


def _interpolate_last(h: IntPoly, xi: int) -> IntPoly:
    """Undo ``_eval_last`` using balanced base-``xi`` digits of each coefficient."""
    out: IntPoly = {}
    half = xi // 2
    for k, c in h.items():
        i = 0
        while c:
            d = c % xi
            if d > half:
                d -= xi
            if d:
                out[k + (i,)] = d
            c = (c - d) // xi
            i += 1
    return out


def _divides(g: IntPoly, p: IntPoly) -> bool:
    try:
        divide_exact(p, g)
        return True
    except ArithmeticError:
        return False


def _heu_gcd(p: IntPoly, q: IntPoly, nvars: int, depth: int = 0) -> IntPoly | None:
    if nvars == 0:
        return {(): igcd(p.get((), 0), q.get((), 0))}
    c = igcd(_int_content(p), _int_content(q))
    pp = {e: v // c for e, v in p.items()}
    qq = {e: v // c for e, v in q.items()}
    xi = 2 * min(_max_norm(pp), _max_norm(qq)) + 29
    for _ in range(6):
        a, b = _eval_last(pp, xi), _eval_last(qq, xi)
        if a and b:
            h = _heu_gcd(a, b, nvars - 1, depth + 1)
            if h is not None:
                g = _interpolate_last(h, xi)
                if g:
                    g = {e: v // _int_content(g) for e, v in g.items()}
                    if _divides(g, pp) and _divides(g, qq):
                        return {e: v * c for e, v in g.items()}
        xi = xi * 73794 // 27011
    return None


def poly_gcd(p: IntPoly, q: IntPoly, nvars: int) -> IntPoly:
    """GCD with positive leading coefficient (graded lex)."""
    if p and q and not (is_constant(p) or is_constant(q)) and p != q:
        g = _heu_gcd(p, q, nvars)
        if g is not None:
            return _normalize_sign(g)
    return _prs_gcd(p, q, nvars)


def _prs_gcd(p: IntPoly, q: IntPoly, nvars: int) -> IntPoly:
    if not p:
        return _normalize_sign(dict(q))
    if not q:
        return _normalize_sign(dict(p))
    zero = (0,) * nvars
    if is_constant(p) or is_constant(q):
        g = igcd(_int_content(p), _int_content(q))
        return {zero: g}
    if p == q:
        return _normalize_sign(dict(p))
    degs = [0] * nvars
    for poly in (p, q):
        for e in poly:
            for i, x in enumerate(e):
                if x > degs[i]:
                    degs[i] = x
    var = next(i for i in range(nvars) if degs[i])
    dp = max(e[var] for e in p)
    dq = max(e[var] for e in q)
    if dp == 0:
        return poly_gcd(p, content_in(q, var, nvars), nvars)
    if dq == 0:
        return poly_gcd(content_in(p, var, nvars), q, nvars)
    cp = content_in(p, var, nvars)
    cq = content_in(q, var, nvars)
    c = poly_gcd(cp, cq, nvars)
    a = divide_exact(p, cp)
    b = divide_exact(q, cq)
    # try the cheap case where one divides the other
    if dp < dq or (dp == dq and len(a) > len(b)):
        a, b = b, a
    try:
        divide_exact(a, b)
        g = b
    except ArithmeticError:
        while b:
            r = _prem(a, b, var)
            if not r:
                break
            if not any(e[var] for e in r):
                b = {}
                a = {zero: 1}
                break
            r = divide_exact(r, content_in(r, var, nvars))
            a, b = b, r
        g = b if b else a
        g = divide_exact(g, content_in(g, var, nvars))
    return _normalize_sign(mul(g, c))
