import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degprobe.boolfun import (
    AffineMap,
    Anf,
    AnfParseError,
    BlackBox,
    TruthTable,
    all_derivatives,
    anf_to_tt,
    batch_degrees,
    coefficient,
    complement,
    compose_affine,
    dd_k,
    degree,
    derivative,
    disjoint_sum,
    fast_points,
    format_anf,
    format_truth_table,
    moebius,
    parse_anf,
    parse_truth_table,
    product,
    read_truth_table,
    to_anf,
    truth_table,
)
from degprobe.gf2 import GF2Matrix, popcount, random_invertible

from conftest import random_anf, random_table


def naive_anf(bits, n):
    """b_a = XOR of f(x) over x below a, O(4^n)."""
    return frozenset(a for a in range(1 << n) if sum(bits[x] for x in range(1 << n) if x & ~a == 0) & 1)


def naive_eval(mons, x):
    return sum(1 for m in mons if x & m == m) & 1


tables = st.integers(1, 8).flatmap(
    lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n).map(
        lambda bits: TruthTable(n, np.array(bits, dtype=np.uint8))
    )
)


def test_moebius_examples():
    tt = TruthTable(2, np.array([0, 0, 0, 1], dtype=np.uint8))
    assert moebius(tt).monomials == {0b11}
    a = parse_anf("x1x2x3", 3)
    assert truth_table(a).weight() == 1
    assert moebius(TruthTable.zeros(3)).degree() is None
    assert moebius(TruthTable(1, np.array([1, 1], dtype=np.uint8))).monomials == {0}


@settings(max_examples=200, deadline=None)
@given(tables)
def test_moebius_matches_naive(tt):
    assert moebius(tt).monomials == naive_anf(tt.bits, tt.n)
    assert anf_to_tt(moebius(tt)) == tt


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_moebius_involution(n, seed):
    rng = np.random.default_rng(seed)
    tt = TruthTable(n, random_table(n, rng))
    back = anf_to_tt(moebius(tt))
    assert back == tt
    anf = moebius(tt)
    assert to_anf(anf_to_tt(anf)) == anf


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.data())
def test_anf_evaluation_matches_table(n, data):
    mons = frozenset(data.draw(st.sets(st.integers(0, (1 << n) - 1))))
    a = Anf(n, mons)
    tt = truth_table(a)
    assert all(tt(x) == a(x) == naive_eval(mons, x) for x in range(1 << n))


def test_degree_and_counts():
    a = parse_anf("x1x2x3 + x1x4 + 1", 5)
    assert a.degree() == 3 == degree(a)
    assert a.count(3) == 1 and a.count(2) == 1 and a.count(0) == 1
    assert not a.is_homogeneous()
    assert Anf(3, frozenset()).degree() is None
    assert Anf(3, frozenset({0})).degree() == 0


def test_batch_degrees_matches_single(rng):
    n = 5
    rows = np.stack([random_table(n, rng) for _ in range(50)] + [np.zeros(1 << n, np.uint8)])
    degs = batch_degrees(rows, n)
    for row, d in zip(rows, degs):
        want = moebius(TruthTable(n, row)).degree()
        assert d == (-1 if want is None else want)


def test_coefficient_examples():
    f = parse_anf("x1x2 + x3", 3)
    assert coefficient(f, [1, 2]) == 1
    assert coefficient(f, [1]) == 0
    assert coefficient(f, [3]) == 1
    assert coefficient(f, []) == 0
    with pytest.raises(ValueError):
        coefficient(f, [0])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_coefficient_matches_moebius_exhaustively(n, rng):
    for _ in range(20):
        tt = TruthTable(n, random_table(n, rng))
        mons = moebius(tt).monomials
        for m in range(1 << n):
            support = [i + 1 for i in range(n) if m >> i & 1]
            assert coefficient(tt, support) == (m in mons)


def test_coefficient_uses_few_queries():
    box = BlackBox(10, lambda x: popcount(x) & 1)
    coefficient(box, [1, 4, 9])
    assert box.calls == 8


def test_dd_k_examples():
    assert dd_k(parse_anf("x1x2x3", 9), 3) == Fraction(1, 84)
    assert dd_k(parse_anf("x1x2x3 + x4x5x6 + x7x8x9", 9), 3) == Fraction(3, 84)
    assert dd_k(parse_anf("x1x2", 2), 2) == 1


def test_compose_affine_examples():
    x1 = parse_anf("x1", 2)
    assert compose_affine(x1, AffineMap(GF2Matrix.identity(2))) == x1
    swap = GF2Matrix.from_rows([[0, 1], [1, 0]])
    assert compose_affine(x1, AffineMap(swap)) == parse_anf("x2", 2)
    shifted = compose_affine(parse_anf("x1x2", 2), AffineMap(GF2Matrix.identity(2), 0b01))
    assert shifted == parse_anf("x1x2 + x2", 2)
    with pytest.raises(ValueError):
        AffineMap(GF2Matrix.zero(2))


def test_compose_keeps_representation(rng):
    tt = TruthTable(4, random_table(4, rng))
    phi = AffineMap(random_invertible(4, rng), 5)
    assert isinstance(compose_affine(tt, phi), TruthTable)
    assert isinstance(compose_affine(moebius(tt), phi), Anf)
    box = compose_affine(BlackBox(4, tt), phi)
    assert isinstance(box, BlackBox)
    assert all(box(x) == tt(phi(x)) for x in range(16))


def test_coefficient_of_composition_is_affine_space_sum(rng):
    """The coefficient of x_{i1}..x_{ik} in f(Mx + u0) sums f over
    u0 + span(M e_{i1}, ..., M e_{ik})."""
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, n + 1))
        tt = TruthTable(n, random_table(n, rng))
        m = random_invertible(n, rng)
        u0 = int(rng.integers(0, 1 << n))
        idx = sorted(int(i) for i in rng.choice(n, size=k, replace=False))
        g = compose_affine(tt, AffineMap(m, u0))
        mask = sum(1 << i for i in idx)
        pts = [u0]
        for i in idx:
            pts += [p ^ m.columns[i] for p in pts]
        direct = sum(tt(p) for p in pts) & 1
        assert (mask in moebius(g).monomials) == bool(direct)


def test_degree_invariant_under_affine_maps(rng):
    for _ in range(200):
        n = int(rng.integers(1, 7))
        tt = TruthTable(n, random_table(n, rng))
        phi = AffineMap(random_invertible(n, rng), int(rng.integers(0, 1 << n)))
        assert degree(compose_affine(tt, phi)) == degree(tt)


def test_derivative_examples():
    f = parse_anf("x1x2", 2)
    assert derivative(f, 0b01) == parse_anf("x2", 2)
    assert derivative(f, 0).is_zero
    g = parse_anf("x1x2x3", 3)
    assert derivative(g, 0b001) == parse_anf("x2x3", 3)


def test_derivatives_drop_degree(rng):
    for n in range(1, 9):
        for _ in range(5):
            tt = TruthTable(n, random_table(n, rng))
            d = degree(tt)
            ders = all_derivatives(tt)
            for a in range(1 << n):
                assert TruthTable(n, ders[a]) == derivative(tt, a)
            degs = batch_degrees(ders, n)
            assert (degs <= (d or 0) - 1).all() or d is None


def test_fast_points_examples():
    assert fast_points(parse_anf("x1x2", 2)) == set()
    assert fast_points(parse_anf("x1x2x3", 4)) == {0b1000}
    with pytest.raises(ValueError):
        fast_points(Anf(3, frozenset({0})))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_fast_point_count_bound(n, rng):
    for k in range(1, n + 1):
        for _ in range(3):
            f = random_anf(n, rng, k)
            fp = fast_points(f)
            assert len(fp) + 1 <= 1 << (n - k)
            # the set plus 0 is a subspace
            assert all(a ^ b in fp | {0} for a in fp for b in fp)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_fast_point_count_equality_for_monomials(n, rng):
    for k in range(1, n + 1):
        mono = Anf(n, frozenset({(1 << k) - 1}))
        phi = AffineMap(random_invertible(n, rng), int(rng.integers(0, 1 << n)))
        f = compose_affine(mono, phi)
        assert len(fast_points(f)) + 1 == 1 << (n - k)


def test_complement_examples():
    assert complement(parse_anf("x1x2", 4)) == parse_anf("x3x4", 4)
    assert complement(parse_anf("x1x2x3", 8)) == parse_anf("x4x5x6x7x8", 8)
    with pytest.raises(ValueError):
        complement(parse_anf("x1x2 + x3", 4))


def test_complement_twice_is_identity(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n))
        f = random_anf(n, rng, k, homogeneous=True)
        c = complement(f)
        assert c.degree() == n - k and c.is_homogeneous()
        assert complement(c) == f


def test_disjoint_sum_and_product():
    s = disjoint_sum(parse_anf("x1x2", 2), parse_anf("x1x2", 2))
    assert s == parse_anf("x1x2 + x3x4", 4)
    p = product(parse_anf("x1 + x2", 3), parse_anf("x2 + x3", 3))
    assert p == parse_anf("x1x2 + x1x3 + x2 + x2x3", 3)
    with pytest.raises(ValueError):
        product(parse_anf("x1", 1), parse_anf("x1", 2))


def test_parse_examples():
    a = parse_anf("x1x2x7 + x3x4x7", 8)
    assert a.monomials == {0b1000011, 0b1001100}
    assert parse_anf("x1*x2 ⊕ x3") == parse_anf("x1x2 + x3", 3)
    assert parse_anf("x1x1x2", 2) == parse_anf("x1x2", 2)
    assert parse_anf("x1 + x1 + x2", 2) == parse_anf("x2", 2)
    assert parse_anf("0", 3).is_zero
    assert parse_anf("1", 2).monomials == {0}
    assert parse_anf("x3").n == 3


@pytest.mark.parametrize(
    "text,pos",
    [("x1 + + x2", 5), ("x1 + y2", 5), ("", 0), ("x1 +", 4), ("x9", 0), ("x1 1", 3), ("x0", 0)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(AnfParseError) as err:
        parse_anf(text, 8)
    assert err.value.pos == pos


def test_format_examples():
    assert format_anf(parse_anf("x3x4x7 + x1x2x7", 8)) == "x1x2x7 + x3x4x7"
    assert format_anf(parse_anf("x1 + x2x3 + 1", 3)) == "x2x3 + x1 + 1"
    assert format_anf(Anf(2, frozenset())) == "0"
    assert str(parse_anf("x2", 2)) == "x2"


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 9), st.data())
def test_format_parse_round_trip(n, data):
    a = Anf(n, frozenset(data.draw(st.sets(st.integers(0, (1 << n) - 1), max_size=12))))
    assert parse_anf(format_anf(a), n) == a


def test_truth_table_files(tmp_path):
    tt = parse_truth_table("n=2\n0001\n")
    assert moebius(tt) == parse_anf("x1x2", 2)
    hx = parse_truth_table("n=3\n08\n", hex_mode=True)
    # nibble j covers points 4j..4j+3, least significant bit first
    assert list(hx.bits) == [0, 0, 0, 0, 0, 0, 0, 1]
    assert hx.to_hex() == "08"
    for n in (2, 3, 5):
        t = TruthTable(n, random_table(n, np.random.default_rng(n)))
        for hex_mode in (False, True):
            p = tmp_path / f"t{n}{hex_mode}.txt"
            p.write_text(format_truth_table(t, hex_mode))
            assert read_truth_table(p, hex_mode) == t


@pytest.mark.parametrize("text", ["n=2\n001\n", "n=2\n0021\n", "2\n0001\n", "n=x\n01\n", "n=2\n"])
def test_truth_table_errors(text):
    with pytest.raises(ValueError):
        parse_truth_table(text)


def test_truth_table_is_immutable_value():
    bits = np.array([0, 1, 1, 0], dtype=np.uint8)
    tt = TruthTable(2, bits)
    bits[0] = 1
    assert tt(0) == 0
    with pytest.raises(ValueError):
        tt.bits[0] = 1
    assert hash(tt) == hash(TruthTable(2, np.array([0, 1, 1, 0], dtype=np.uint8)))
    with pytest.raises(ValueError):
        TruthTable(2, np.array([0, 1, 2, 0]))


def test_extend_adds_unused_variables():
    a = parse_anf("x1x2", 2).extend(4)
    assert a.n == 4 and a.monomials == {0b11}
    with pytest.raises(ValueError):
        a.extend(3)
