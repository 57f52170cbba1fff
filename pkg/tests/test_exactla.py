import random
from fractions import Fraction

import pytest

from zvkilling.exactla import (MatrixFormatError, PrimeSelectionError, RankResult, SparseRationalMatrix,
                               certify_rank, compute_rank, draw_primes, dumps_triplets, kernel_basis,
                               loads_triplets, random_prime, rank_exact, rank_mod_p, rank_modular, rref_rational)


def dense_rank(rows):
    """Textbook Gaussian elimination over Fractions (independent oracle)."""
    a = [[Fraction(v) for v in r] for r in rows]
    rank, ncols = 0, len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def low_rank(rng, rows, cols, inner, lo=-9, hi=9, rational=False):
    def entry():
        v = Fraction(rng.randint(lo, hi))
        return v / rng.randint(1, 7) if rational else v

    left = [[entry() for _ in range(inner)] for _ in range(rows)]
    right = [[entry() for _ in range(cols)] for _ in range(inner)]
    return [[sum(left[i][k] * right[k][j] for k in range(inner)) for j in range(cols)] for i in range(rows)]


def test_identity():
    eye = SparseRationalMatrix.from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert rank_exact(eye).rank == 3
    assert rank_mod_p(eye, random_prime(61, random.Random(1))) == 3
    assert kernel_basis(eye) == []


def test_empty():
    assert rank_exact(SparseRationalMatrix(0, 5)).rank == 0
    assert rank_exact(SparseRationalMatrix(4, 4)).rank == 0


def test_kernel_of_row():
    assert kernel_basis(SparseRationalMatrix.from_dense([[1, 1]])) == [[Fraction(-1), Fraction(1)]]


@pytest.mark.parametrize("seed", range(10))
def test_product_rank(seed):
    rng = random.Random(seed)
    rows = low_rank(rng, 20, 30, 7, rational=True)
    m = SparseRationalMatrix.from_dense(rows)
    assert dense_rank(rows) == 7
    assert rank_exact(m).rank == 7
    ker = kernel_basis(m)
    assert len(ker) == 23
    assert all(m.annihilates(v) for v in ker)


def test_modular_never_exceeds_exact():
    rng = random.Random(2024)
    agree = 0
    for _ in range(100):
        r, c = rng.randint(1, 12), rng.randint(1, 12)
        rows = low_rank(rng, r, c, rng.randint(1, min(r, c)), lo=-50, hi=50, rational=rng.random() < 0.5)
        m = SparseRationalMatrix.from_dense(rows)
        exact = rank_exact(m).rank
        assert exact == dense_rank(rows)
        p = random_prime(60, rng)
        try:
            mod = rank_mod_p(m, p)
        except PrimeSelectionError:
            continue
        assert mod <= exact
        agree += mod == exact
    assert agree >= 99


def test_rank_drops_modulo_p():
    p = random_prime(31, random.Random(5))
    m = SparseRationalMatrix.from_dense([[2, 0], [0, p]])
    assert rank_mod_p(m, p) == 1
    assert rank_exact(m).rank == 2


def test_small_prime_rejected():
    with pytest.raises(PrimeSelectionError):
        rank_mod_p(SparseRationalMatrix.from_dense([[1]]), 65521)


def test_denominator_prime_skipped():
    p = random_prime(31, random.Random(9))
    m = SparseRationalMatrix.from_dense([[Fraction(1, p), 1], [1, 1]])
    with pytest.raises(PrimeSelectionError):
        rank_modular(m, primes=[p])
    res = rank_modular(m, primes=[p, draw_primes(1, seed=3)[0]])
    assert res.primes_used != [p] and res.rank == 2


def test_numpy_and_sparse_paths_agree():
    rng = random.Random(11)
    for _ in range(20):
        m = SparseRationalMatrix.from_dense(low_rank(rng, 15, 12, rng.randint(1, 12), rational=True))
        small, big = random_prime(31, rng), random_prime(62, rng)
        assert rank_mod_p(m, small) == rank_mod_p(m, big) == rank_exact(m).rank


@pytest.mark.parametrize("seed", range(15))
def test_certificate_rule(seed):
    rng = random.Random(seed)
    rows = low_rank(rng, 12, 16, rng.randint(2, 10), rational=True)
    m = SparseRationalMatrix.from_dense(rows)
    exact = rank_exact(m).rank
    res = rank_modular(m, count=1, seed=seed)
    d = m.cols - res.rank
    ker = kernel_basis(m)
    certified = certify_rank(m, res, ker[:d])
    assert certified.certified_exact
    assert certified.rank == exact
    # too few vectors, or vectors outside the kernel, certify nothing
    weak = certify_rank(m, rank_modular(m, count=1, seed=seed), ker[:d - 1])
    assert not weak.certified_exact
    bogus = [[Fraction(1)] * m.cols] * d
    assert not certify_rank(m, rank_modular(m, count=1, seed=seed), bogus).certified_exact


def test_dependent_kernel_vectors_do_not_certify():
    m = SparseRationalMatrix.from_dense([[1, 1, 0, 0], [2, 2, 0, 0]])
    ker = kernel_basis(m)
    res = certify_rank(m, rank_modular(m, count=1), [ker[0], ker[0], [2 * x for x in ker[0]]])
    assert not res.certified_exact


def test_shape_certificate():
    m = SparseRationalMatrix.from_dense([[1, 2, 3], [4, 5, 6]])
    res = rank_modular(m)
    assert res.rank == 2 and res.certified_exact


def test_compute_rank_methods():
    rng = random.Random(3)
    m = SparseRationalMatrix.from_dense(low_rank(rng, 10, 10, 4))
    assert compute_rank(m, "exact").rank == 4
    assert compute_rank(m, "modular").rank == 4
    both = compute_rank(m, "both")
    assert both.rank == 4 and both.certified_exact and both.method == "both"
    with pytest.raises(ValueError):
        compute_rank(m, "float")


def test_permutation_invariance():
    rng = random.Random(8)
    m = SparseRationalMatrix.from_dense(low_rank(rng, 9, 13, 5, rational=True))
    rp = list(range(m.rows))
    cp = list(range(m.cols))
    rng.shuffle(rp)
    rng.shuffle(cp)
    assert rank_exact(m.permuted(rp, cp)).rank == rank_exact(m).rank == 5


def test_rref_is_reduced():
    rng = random.Random(4)
    m = SparseRationalMatrix.from_dense(low_rank(rng, 6, 8, 3, rational=True))
    pivots, rows = rref_rational(m)
    assert len(pivots) == 3
    for c in pivots:
        assert sum(1 for r in rows.values() if r.get(c)) == 1


def test_triplet_round_trip():
    m = SparseRationalMatrix(3, 4, {(0, 1): Fraction(-2, 3), (2, 3): 5, (1, 0): Fraction(7, 11)})
    text = dumps_triplets(m)
    assert text == "3 4 3\n0 1 -2/3\n1 0 7/11\n2 3 5/1\n"
    assert loads_triplets(text) == m
    with pytest.raises(MatrixFormatError):
        loads_triplets("2 2 2\n0 0 1/1\n")
    with pytest.raises(IndexError):
        loads_triplets("1 1 1\n3 0 1/1\n")


def test_rank_result_bounds():
    m = SparseRationalMatrix.from_dense([[1, 2], [2, 4], [0, 1]])
    r = rank_exact(m)
    assert isinstance(r, RankResult) and 0 <= r.rank <= 2 and r.certified_exact
