from fractions import Fraction
from math import comb

import pytest

from zvkilling.exactla import compute_rank, dumps_triplets, loads_triplets, rank_exact
from zvkilling.metric import hamiltonian, invert, zipoy_voorhees
from zvkilling.pde import DX, DY, VALUE, Equation, LinearPDESystem, PDETerm, Unknown, build_system
from zvkilling.prolongation import (assemble, clear_denominators, column_key, jet_column, jet_dimension, multi_indices_upto, prolong,
                                    symbol_assemble)
from zvkilling.ratexpr import RationalFunction, SingularPointError, parse_rational_function

V = ("x", "y")
P = {"x": Fraction(1, 2), "y": Fraction(2)}


def rf(text):
    return parse_rational_function(text, V)


def toy(*equations):
    """Single-unknown system; each equation is a list of (derivative, coefficient text)."""
    f = Unknown((1,), "even")
    eqs = tuple(Equation((i,), tuple(PDETerm(f, d, rf(c)) for d, c in terms)) for i, terms in enumerate(equations))
    return LinearPDESystem(V, ("p",), 1, (f,), eqs, "even")


def test_jet_dimension():
    assert jet_dimension(44, 6) == 1584
    assert jet_dimension(40, 4) == 840
    assert jet_dimension(1, 0) == 3


def test_column_order():
    s = toy([(DX, "1")])
    keys = column_key(s, 1)
    assert [k.multi_index for k in keys] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert all(jet_column(0, k.multi_index, 1) == i for i, k in enumerate(keys))


@pytest.mark.parametrize("degree", range(1, 8))
def test_dimension_identities(h2, degree):
    for parity in ("odd", "even"):
        s = build_system(h2, degree, parity)
        cleared = clear_denominators(s)
        for n in range(7):
            ps = prolong(s, n, cleared)
            assert len(ps.equations) == len(s.equations) * comb(n + 2, 2)
            assert ps.num_jets == len(s.unknowns) * comb(n + 3, 2)


def test_toy_leibniz_prolongation():
    # d_x f = c f with c = x*y^2 + 1/x
    ps = prolong(toy([(DX, "1"), (VALUE, "-(x*y^2 + 1/x)")]), 1)
    assert len(ps.equations) == 3
    row = ps.equations.index((0, (1, 0)))
    terms = {}
    for _, mi, coef in ps.row_terms(row):
        terms[mi] = terms[mi] + coef if mi in terms else coef
    # cleared by x: x f_x - (x^2 y^2 + 1) f = 0, so D_x gives
    # x f_xx + (1 - x^2 y^2 - 1) f_x - 2 x y^2 f
    assert set(terms) == {(2, 0), (1, 0), (0, 0)}
    assert RationalFunction(terms[(2, 0)]) == rf("x")
    assert RationalFunction(terms[(1, 0)]) == rf("1 - (x^2*y^2 + 1)")
    assert RationalFunction(terms[(0, 0)]) == rf("-2*x*y^2")


def test_toy_first_prolongation_matrix():
    ps = prolong(toy([(DX, "1"), (VALUE, "-(x*y^2 + 1/x)")]), 1)
    a = assemble(ps, P)
    assert (a.rows, a.cols) == (3, 6)
    # row for d_x: x f_xx + (1 - c x) ... at (1/2, 2): coefficient of f_xx is 1/2
    r = ps.equations.index((0, (1, 0)))
    assert a.entries[(r, jet_column(0, (2, 0), 1))] == Fraction(1, 2)


def test_toy_gradient_system():
    a = assemble(prolong(toy([(DX, "1")], [(DY, "1")]), 0), P)
    assert a.matrix.to_dense() == [[0, 1, 0], [0, 0, 1]]


def test_toy_symbol():
    sym = symbol_assemble(toy([(DX, "1"), (VALUE, "-1")]), 0, P)
    assert sym.matrix.to_dense() == [[1, 0]]


def test_singular_point_reported():
    ps = prolong(toy([(DX, "1"), (VALUE, "1/(x-1)")]), 0)
    with pytest.raises(SingularPointError) as e:
        assemble(ps, {"x": 1, "y": 0})
    assert "try one of" in str(e.value)


def test_even_base_matrix(search6):
    m = search6.matrix("even", 0)
    assert (m.rows, m.cols) == (60, 132)
    assert rank_exact(m).rank == 60


def test_prolonged_count_degree_six(search6):
    ps = prolong(search6.system("even"), 6, search6.cleared("even"))
    assert len(ps.equations) == 1680


def test_ranks_agree_at_two_points(h2):
    even = build_system(h2, 6, "even")
    for n in range(5):
        ps = prolong(even, n)
        r1 = compute_rank(assemble(ps, P).matrix, "modular").rank
        r2 = compute_rank(assemble(ps, {"x": Fraction(1, 3), "y": Fraction(3)}).matrix, "modular").rank
        assert r1 == r2


def test_scaling_invariance(h2):
    s = build_system(h2, 3, "odd")
    factor = rf("(x^2 + y + 3)/(y^2 + 1)")
    scaled_eq = Equation(s.equations[0].tag, tuple(PDETerm(t.unknown, t.derivative, t.coefficient * factor)
                                                    for t in s.equations[0].terms))
    scaled = LinearPDESystem(s.variables, s.momenta, s.degree, s.unknowns, (scaled_eq,) + s.equations[1:],
                             s.parity)
    for n in range(4):
        a = rank_exact(assemble(prolong(s, n), P).matrix).rank
        b = rank_exact(assemble(prolong(scaled, n), P).matrix).rank
        assert a == b


def test_structural_zero_blocks(search6):
    n = 3
    s = search6.system("odd")
    m = search6.matrix("odd", n)
    ps = prolong(s, n, search6.cleared("odd"))
    nu = len(s.unknowns)
    mis = multi_indices_upto(n + 1)
    for (r, c) in m.entries:
        _, (a, b) = ps.equations[r]
        order = sum(mis[c // nu])
        assert order <= a + b + 1
        assert order >= 0


def test_triplets_deterministic(search6):
    m = search6.matrix("odd", 1)
    text = dumps_triplets(m)
    assert text == dumps_triplets(loads_triplets(text))
    assert loads_triplets(text) == m
    assert text.splitlines()[0] == f"{m.rows} {m.cols} {m.nnz}"


def test_flat_symbol_dimensions():
    even = build_system(hamiltonian(invert(zipoy_voorhees(0))), 6, "even")
    s0 = symbol_assemble(even, 0, P)
    assert s0.cols == 88
    s6 = symbol_assemble(even, 6, P)
    assert s6.cols == 352 and rank_exact(s6.matrix).rank == 352
