from fractions import Fraction

import pytest

from zvkilling.metric import (MetricError, hamiltonian, inverse_as_metric, invert, load_metric_file, matmul,
                              metric_to_text, parse_metric_text, zipoy_voorhees)
from zvkilling.ratexpr import RationalFunction, SingularPointError, parse_rational_function

V = ("x", "y")


def rf(text):
    return parse_rational_function(text, V)


def identity():
    one, zero = RationalFunction.constant(V, 1), RationalFunction.constant(V, 0)
    return tuple(tuple(one if i == j else zero for j in range(4)) for i in range(4))


def test_flat_member():
    g = zipoy_voorhees(0).g_lower
    assert g[3][3] == rf("-1")
    assert g[2][2] == rf("(x^2-1)*(1-y^2)")
    assert g[0][0] == rf("(x^2-y^2)/(x^2-1)")


def test_delta_two_member():
    g = zipoy_voorhees(2).g_lower
    assert g[3][3] == rf("-((x-1)/(x+1))^2")
    # ((x+1)/(x-1))^2 (x^2-y^2) ((x^2-1)/(x^2-y^2))^4 / (x^2-1)
    assert g[0][0] == rf("((x+1)/(x-1))^2*(x^2-y^2)*((x^2-1)/(x^2-y^2))^4/(x^2-1)")
    assert g[1][1] == rf("((x+1)/(x-1))^2*(x^2-y^2)*((x^2-1)/(x^2-y^2))^4/(1-y^2)")
    assert g[2][2] == rf("((x+1)/(x-1))^2*(x^2-1)*(1-y^2)")


def test_schwarzschild_member():
    # with x = r/m - 1: -(1 - 2m/r) dt^2 and r^2 sin^2 dphi^2 (m = 1, y = cos theta)
    g = zipoy_voorhees(1).g_lower
    assert g[3][3] == rf("-(x-1)/(x+1)")
    assert g[2][2] == rf("(x+1)^2*(1-y^2)")
    assert g[0][0] == rf("(x+1)/(x-1)")


@pytest.mark.parametrize("bad", [-1, 1.5, "2"])
def test_bad_delta(bad):
    with pytest.raises((MetricError, TypeError, ValueError)):
        zipoy_voorhees(bad)


@pytest.mark.parametrize("delta", [0, 1, 2, 3])
def test_inverse_is_exact(delta):
    m = zipoy_voorhees(delta)
    assert matmul(m.g_lower, invert(m).g_upper) == identity()


def test_inverse_entries():
    assert invert(zipoy_voorhees(2)).g_upper[3][3] == rf("-((x+1)/(x-1))^2")
    assert invert(zipoy_voorhees(0)).g_upper[0][0] == rf("(x^2-1)/(x^2-y^2)")


def test_inversion_involution_non_diagonal():
    text = """
    coords: x y phi t
    cyclic: phi t
    g 0 0 = 1 + x^2
    g 1 1 = 1/(1+y^2)
    g 2 2 = x^2 + 1
    g 2 3 = y
    g 3 3 = -1
    """
    m = parse_metric_text(text)
    back = invert(inverse_as_metric(invert(m)))
    assert tuple(map(tuple, back.g_upper)) == tuple(map(tuple, m.g_lower))
    assert matmul(m.g_lower, invert(m).g_upper) == identity()


def test_hamiltonian_structure():
    h = hamiltonian(invert(zipoy_voorhees(2)))
    assert len(h.terms) == 4
    assert set(h.terms) == {(2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)}
    assert h.is_parity_even()
    for c in h.terms.values():
        assert set(c.num.used_variables()) | set(c.den.used_variables()) <= {"x", "y"}
    mixing = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    assert all(h.coefficient(e).is_zero() for e in mixing)


def test_flat_hamiltonian_pt_coefficient():
    h = hamiltonian(invert(zipoy_voorhees(0)))
    assert h.coefficient((0, 0, 0, 2)).evaluate({"x": Fraction(1, 2), "y": 2}) == Fraction(-1, 2)


def test_off_diagonal_weight():
    m = parse_metric_text("coords: x y phi t\ncyclic: phi t\ng 0 0 = 1\ng 1 1 = 1\ng 2 2 = 2\ng 2 3 = 1\ng 3 3 = 1\n")
    h = hamiltonian(invert(m))
    # inverse of [[2,1],[1,1]] is [[1,-1],[-1,2]]: H = 1/2 p_phi^2 - p_phi p_t + p_t^2 + ...
    assert h.coefficient((0, 0, 2, 0)) == rf("1/2")
    assert h.coefficient((0, 0, 1, 1)) == rf("-1")
    assert h.coefficient((0, 0, 0, 2)) == rf("1")


def test_singular_locus():
    m = zipoy_voorhees(2)
    m.check_point({"x": Fraction(1, 2), "y": Fraction(2)})
    for bad in ({"x": 1, "y": 3}, {"x": 2, "y": -1}, {"x": 2, "y": 2}, {"x": 3, "y": -3}):
        with pytest.raises(SingularPointError):
            m.check_point(bad)


def test_metric_file_round_trip(tmp_path):
    m = zipoy_voorhees(2)
    path = tmp_path / "zv2.metric"
    path.write_text(metric_to_text(m))
    back = load_metric_file(path)
    assert back.g_lower == m.g_lower
    assert back.cyclic == m.cyclic
    assert back.fingerprint() == m.fingerprint()


def test_metric_validation():
    with pytest.raises(MetricError):
        parse_metric_text("coords: x y phi t\ncyclic: phi t\ng 0 0 = phi\ng 1 1 = 1\ng 2 2 = 1\ng 3 3 = -1\n")
    with pytest.raises(MetricError):
        parse_metric_text("coords: x y phi t\ncyclic: phi t\ng 0 0 = 1\ng 1 1 = 1\ng 2 2 = 1\n")
