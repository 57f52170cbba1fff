"""Acceptance criteria, one PASS/FAIL line each (printed in the terminal summary)."""

import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES
from zvkilling.analysis import CANDIDATE, NO_NONTRIVIAL, IntegralSearch, bracket_residuals, trivial_basis
from zvkilling.cli.geodesic import DEFAULT_MOMENTA, DEFAULT_POSITION, geodesic_sanity
from zvkilling.cli.main import RunConfig, run
from zvkilling.metric import hamiltonian, invert, zipoy_voorhees
from zvkilling.pde import build_system

pytestmark = pytest.mark.slow

POINT = {"x": Fraction(1, 2), "y": Fraction(2)}
TESTS = Path(__file__).parent

ODD_EXPECTED = {0: (60, 120, 60, 60), 1: (180, 240, 180, 60), 2: (360, 400, 360, 40), 3: (600, 600, 590, 10),
                4: (900, 840, 838, 2)}
ODD_FINAL = (1680, 1440, 1440, 0)
EVEN_EXPECTED = {0: (60, 132, 60, 56), 1: (180, 264, 180, 68), 2: (360, 440, 360, 64), 3: (600, 660, 600, 44),
                 4: (900, 924, 888, 20), 5: (1260, 1232, 1215, 1), 6: (1680, 1584, 1568, 0)}


def record(number, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _quad(r):
    return r["num_equations"], r["dim_u"], r["rank"], r["delta"]


@pytest.fixture(scope="module")
def degree_six():
    out = {}
    for parity in ("odd", "even"):
        t0 = time.perf_counter()
        rep = run(RunConfig(delta=2, degree=6, parities=(parity,), max_prolong=6, rank_method="both",
                            geodesic_steps=0))
        out[parity] = (rep, time.perf_counter() - t0)
    return out


def test_criterion_1_odd_table(degree_six):
    rep, secs = degree_six["odd"]
    pr = rep["parity_results"][0]
    rows = {r["n"]: r for r in pr["delta_table"]["rows"]}
    early = all(n in rows and _quad(rows[n]) == q for n, q in ODD_EXPECTED.items())
    final = 6 in rows and _quad(rows[6]) == ODD_FINAL and rows[6]["certified"]
    flagged = any("labelled n=5" in note for note in pr["delta_table"]["notes"])
    ok = early and final and flagged and pr["verdict"]["outcome"] == NO_NONTRIVIAL and secs <= 600
    record(1, "odd table, delta=2 degree 6", ok,
           f"n=0..4 exact {early}, n=6 (1680,1440,1440,0) {final}, label note {flagged}, {secs:.0f}s")


def test_criterion_2_even_table(degree_six):
    rep, secs = degree_six["even"]
    pr = rep["parity_results"][0]
    rows = {r["n"]: r for r in pr["delta_table"]["rows"]}
    table = all(n in rows and _quad(rows[n]) == q for n, q in EVEN_EXPECTED.items())
    trivial = pr["delta_table"]["trivial_dim"] == 16 and all(r["kernel_contains_trivial"] for r in rows.values())
    certified = all(r["certified"] for r in rows.values())
    ok = table and trivial and certified and pr["verdict"]["outcome"] == NO_NONTRIVIAL and secs <= 3600
    record(2, "even table, delta=2 degree 6", ok,
           f"n=0..6 exact {table}, 16 trivial jets annihilated {trivial}, exact+modular certified {certified}, "
           f"{secs:.0f}s")


def test_criterion_3_finite_type():
    s = IntegralSearch(zipoy_voorhees(0), 6, POINT, rank_method="exact")
    even, odd = s.finite_type("even", 8), s.finite_type("odd", 8)
    ok = even.deltas == [28, 19, 10, 6, 2, 1, 0] and even.ell == 6 and odd.ell == 5
    record(3, "flat symbol table, degree 6", ok, f"even Delta {even.deltas} ell={even.ell}, odd ell={odd.ell}")


def test_criterion_4_quadratic_controls():
    outcomes = {}
    for delta in (2, 1):
        rep = run(RunConfig(delta=delta, degree=2, geodesic_steps=0))
        outcomes[delta] = rep
    zv2 = outcomes[2]["overall"]["outcome"]
    even1 = next(pr for pr in outcomes[1]["parity_results"] if pr["parity"] == "even")["verdict"]
    kernel = even1.get("kernel_dimension")
    ok = zv2 == NO_NONTRIVIAL and even1["outcome"] == CANDIDATE and kernel == 5 and kernel > 4
    record(4, "quadratic controls", ok, f"delta=2 {zv2}; delta=1 even {even1['outcome']} kernel {kernel} "
                                       f"(trivial 4, regression value 5)")


def test_criterion_5_degree_reduction():
    t0 = time.perf_counter()
    verdicts = {k: run(RunConfig(delta=2, degree=k, geodesic_steps=0))["overall"]["outcome"] for k in (3, 4, 5)}
    secs = time.perf_counter() - t0
    ok = all(v == NO_NONTRIVIAL for v in verdicts.values()) and secs <= 3600
    record(5, "degree reduction, delta=2", ok, f"{verdicts}, {secs:.0f}s")


PROPERTY_TESTS = [
    "test_ratexpr.py::test_polynomial_ring_axioms",
    "test_ratexpr.py::test_rational_function_field_axioms",
    "test_ratexpr.py::test_leibniz_rule",
    "test_pde.py::test_bracket_matches_finite_differences",
    "test_exactla.py::test_modular_never_exceeds_exact",
]


def test_criterion_6_property_suites():
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider"]
                          + [str(TESTS / t) for t in PROPERTY_TESTS], capture_output=True, text=True, cwd=TESTS)
    suites = proc.returncode == 0
    # every trivial monomial H^a p_phi^b p_t^c up to degree 6 commutes with H
    h = hamiltonian(invert(zipoy_voorhees(2)))
    count, bad = 0, []
    for degree in range(1, 7):
        for parity in ("odd", "even"):
            basis = trivial_basis(degree, parity, h)
            if not len(basis):
                continue
            s = build_system(h, degree, parity)
            for k in range(len(basis)):
                count += 1
                if not all(r.is_zero() for r in bracket_residuals(basis, s, k)):
                    bad.append(basis.label(k))
    ok = suites and not bad
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record(6, "property suites", ok, f"axioms/Leibniz/bracket/modular rank: {summary}; "
                                     f"{count} trivial monomials annihilated, failures {bad}")


def test_criterion_7_geodesic():
    res = geodesic_sanity(zipoy_voorhees(2), DEFAULT_POSITION, DEFAULT_MOMENTA, steps=100_000)
    ok = res.drift_H < 1e-6 and all(v == 0.0 for v in res.drift_momenta.values())
    record(7, "geodesic sanity (non-rigorous)", ok,
           f"relative H drift {res.drift_H:.2e}, p_phi/p_t drift {res.drift_momenta}")
