import itertools
from fractions import Fraction

import numpy as np
import pytest

from degprobe.gf2 import (
    AffineSpace,
    GF2Matrix,
    SubspaceBasis,
    coset_transversal,
    count_invertible,
    enumerate_subspaces,
    gaussian_binomial,
    gf2_rank,
    iter_subspace_blocks,
    lin_indep_probability,
    random_invertible,
    rank,
    subspace_array,
    tuples_per_affine_space,
    unit,
)


def span_set(vectors):
    pts = {0}
    for v in vectors:
        pts |= {p ^ v for p in pts}
    return frozenset(pts)


def brute_rank(vectors):
    return len(span_set(vectors)).bit_length() - 1


def all_matrices(n):
    for cols in itertools.product(range(1 << n), repeat=n):
        yield GF2Matrix(n, cols)


def test_rank_examples():
    assert rank(GF2Matrix.identity(3)) == 3
    assert rank(GF2Matrix.zero(3)) == 0
    m = GF2Matrix(3, (unit(1), unit(2), unit(1) | unit(2)))
    assert rank(m) == 2
    assert not m.invertible


def test_rank_matches_span_size(rng):
    for _ in range(300):
        n = int(rng.integers(1, 7))
        cols = [int(c) for c in rng.integers(0, 1 << n, size=n)]
        assert gf2_rank(cols) == brute_rank(cols)


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 6), (3, 168)])
def test_count_invertible(n, expected):
    assert count_invertible(n) == expected
    assert sum(m.invertible for m in all_matrices(n)) == expected


def test_gaussian_binomial_examples():
    for n in range(0, 9):
        assert gaussian_binomial(n, 0) == 1
    assert gaussian_binomial(8, 3) == 97155
    assert gaussian_binomial(4, 2) == 35
    with pytest.raises(ValueError):
        gaussian_binomial(3, 4)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gaussian_binomial_by_enumerating_spans(n):
    vecs = range(1, 1 << n)
    for k in range(1, n + 1):
        spaces = {span_set(t) for t in itertools.combinations(vecs, k) if brute_rank(t) == k}
        assert len(spaces) == gaussian_binomial(n, k)


def test_enumerate_small_cases():
    subs = list(enumerate_subspaces(2, 1))
    assert sorted(s.basis for s in subs) == [(0b01,), (0b10,), (0b11,)]
    full = list(enumerate_subspaces(3, 3))
    assert len(full) == 1 and len(span_set(full[0].basis)) == 8
    with pytest.raises(ValueError):
        list(enumerate_subspaces(2, 3))


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_distinct_and_complete(n):
    for k in range(1, n + 1):
        subs = list(enumerate_subspaces(n, k))
        assert len(subs) == gaussian_binomial(n, k)
        spans = {span_set(s.basis) for s in subs}
        assert len(spans) == len(subs)
        for s in subs:
            assert brute_rank(s.basis) == k
            assert SubspaceBasis.from_vectors(n, s.basis) == s


@pytest.mark.parametrize("n", [7, 8])
def test_block_counts_match_gaussian_binomial(n):
    for k in range(1, n + 1):
        assert sum(b.shape[0] for b, _ in iter_subspace_blocks(n, k)) == gaussian_binomial(n, k)


def test_blocks_follow_enumeration_order():
    bases, masks = subspace_array(5, 2)
    listed = list(enumerate_subspaces(5, 2))
    assert [tuple(int(v) for v in row) for row in bases] == [s.basis for s in listed]
    assert [int(m) for m in masks] == [s.pivot_mask for s in listed]


def test_stream_length_8_3():
    assert sum(1 for _ in enumerate_subspaces(8, 3)) == 97155


def test_canonical_form_is_basis_independent(rng):
    for n in range(1, 7):
        for k in range(1, min(n, 3) + 1):
            for _ in range(1000 // (n * k)):
                vecs = []
                while brute_rank(vecs) < k:
                    vecs = [int(v) for v in rng.integers(1, 1 << n, size=k)]
                canon = SubspaceBasis.from_vectors(n, vecs)
                # random change of basis inside the same span
                g = random_invertible(k, rng)
                other = [0] * k
                for j, col in enumerate(g.columns):
                    for i in range(k):
                        if col >> i & 1:
                            other[j] ^= vecs[i]
                # redundant spanning vectors are allowed too
                other.append(other[0] ^ other[-1])
                assert SubspaceBasis.from_vectors(n, other) == canon
                assert span_set(canon.basis) == span_set(vecs)
                piv = canon.pivots
                assert list(piv) == sorted(set(piv))
                for j, b in enumerate(canon.basis):
                    assert (b & -b).bit_length() - 1 == piv[j]
                    assert all(not b >> p & 1 for i, p in enumerate(piv) if i != j)


def test_coset_transversal_examples():
    assert coset_transversal(next(enumerate_subspaces(3, 3))) == [0]
    s = SubspaceBasis.from_vectors(2, [0b01])
    assert coset_transversal(s) == [0b00, 0b10]


@pytest.mark.parametrize("n,k", [(8, 3), (5, 2), (4, 4), (6, 1)])
def test_cosets_partition_space(n, k, rng):
    subs = list(enumerate_subspaces(n, k))
    for idx in rng.integers(0, len(subs), size=10):
        s = subs[int(idx)]
        offs = coset_transversal(s)
        assert len(offs) == 1 << (n - k)
        assert all(not o & s.pivot_mask for o in offs)
        span = s.span()
        cover = [o ^ p for o in offs for p in span]
        assert sorted(cover) == list(range(1 << n))
        for x in range(1 << n):
            assert s.reduce(x) in offs


def test_affine_space_from_tuple():
    a = AffineSpace.from_tuple(3, 0b111, [0b001, 0b011])
    assert a.offset == 0b100
    assert sorted(a.points()) == sorted(0b111 ^ p for p in span_set([0b001, 0b011]))
    assert len(a) == 4


def test_tuples_per_affine_space_by_counting():
    # count ordered tuples (u0, u1, u2) in F_2^3 that give one fixed plane
    n, k = 3, 2
    target = AffineSpace.from_tuple(n, 0b001, [0b010, 0b100])
    hits = 0
    for u0, u1, u2 in itertools.product(range(8), repeat=3):
        if brute_rank([u1, u2]) == k and AffineSpace.from_tuple(n, u0, [u1, u2]) == target:
            hits += 1
    assert hits == tuples_per_affine_space(k) == 4 * 6


def test_random_invertible_examples():
    rng = np.random.default_rng(7)
    assert random_invertible(1, rng) == GF2Matrix.identity(1)
    assert all(random_invertible(3, rng).rank == 3 for _ in range(10_000))


def test_random_invertible_uniformity_smoke():
    rng = np.random.default_rng(99)
    draws = 100_000
    hits = sum(random_invertible(8, rng).columns[0] & 1 for _ in range(draws))
    sigma = (0.25 / draws) ** 0.5
    assert abs(hits / draws - 0.5) < 3 * sigma


def test_random_invertible_covers_gl2_uniformly():
    rng = np.random.default_rng(3)
    counts = {}
    for _ in range(6000):
        m = random_invertible(2, rng)
        counts[m.columns] = counts.get(m.columns, 0) + 1
    assert len(counts) == 6
    assert all(abs(c - 1000) < 150 for c in counts.values())


def test_lin_indep_probability_examples():
    assert lin_indep_probability(1, 1) == Fraction(1, 2)
    assert lin_indep_probability(8, 3) == Fraction(255, 256) * Fraction(127, 128) * Fraction(63, 64)
    assert f"{float(lin_indep_probability(8, 3)):.6f}" == "0.972869"
    assert f"{float(lin_indep_probability(8, 8)):.6f}" == "0.289919"
    assert lin_indep_probability(3, 4) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lin_indep_probability_by_enumeration(n):
    for k in range(1, n + 2):
        tuples = list(itertools.product(range(1 << n), repeat=k))
        indep = sum(brute_rank(t) == k for t in tuples)
        assert lin_indep_probability(n, k) == Fraction(indep, len(tuples))


def test_product_of_invertibles_is_invertible(rng):
    for _ in range(200):
        n = int(rng.integers(1, 7))
        a, b = random_invertible(n, rng), random_invertible(n, rng)
        assert (a @ b).rank == n
        x = int(rng.integers(0, 1 << n))
        assert (a @ b).apply(x) == a.apply(b.apply(x))


def test_matrix_rows_and_image_table():
    m = GF2Matrix.from_rows([[1, 1], [0, 1]])
    assert m.columns == (0b01, 0b11)
    assert list(m.image_table()) == [m.apply(x) for x in range(4)]
    with pytest.raises(ValueError):
        GF2Matrix(2, (1,))
