"""Linear algebra over F_2 on integer bitsets.

A point of F_2^n is a plain ``int`` whose bit ``i - 1`` holds coordinate
x_i, so the point index used by truth tables is the integer itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_N = 24


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}, got {n}")


def popcount(x: int) -> int:
    return bin(x).count("1")


def unit(i: int) -> int:
    """Canonical basis vector e_i (1-based)."""
    return 1 << (i - 1)


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank of a list of bitset vectors."""
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


@dataclass(frozen=True)
class GF2Matrix:
    """Square matrix stored by columns; ``columns[j]`` is M e_{j+1}."""

    n: int
    columns: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        if len(self.columns) != self.n:
            raise ValueError("matrix must be square")
        limit = 1 << self.n
        if any(not 0 <= c < limit for c in self.columns):
            raise ValueError("column has bits outside F_2^n")

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls(n, tuple(1 << j for j in range(n)))

    @classmethod
    def zero(cls, n: int) -> GF2Matrix:
        return cls(n, (0,) * n)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> GF2Matrix:
        n = len(rows)
        cols = [0] * n
        for i, row in enumerate(rows):
            for j, bit in enumerate(row):
                if bit & 1:
                    cols[j] |= 1 << i
        return cls(n, tuple(cols))

    def apply(self, x: int) -> int:
        out = 0
        j = 0
        while x:
            if x & 1:
                out ^= self.columns[j]
            x >>= 1
            j += 1
        return out

    def __matmul__(self, other: GF2Matrix) -> GF2Matrix:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return GF2Matrix(self.n, tuple(self.apply(c) for c in other.columns))

    def image_table(self) -> np.ndarray:
        """M x for every x in 0 .. 2**n - 1."""
        xs = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros_like(xs)
        for j, col in enumerate(self.columns):
            out ^= ((xs >> j) & 1) * col
        return out

    @property
    def rank(self) -> int:
        return gf2_rank(self.columns)

    @property
    def invertible(self) -> bool:
        return self.rank == self.n


def rank(m: GF2Matrix) -> int:
    return m.rank


def count_invertible(n: int) -> int:
    """|GL(n, F_2)| = (2^n - 1)(2^n - 2)...(2^n - 2^{n-1})."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F_2^n."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    num = 1
    den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (k - i)) - 1
    q, r = divmod(num, den)
    assert r == 0
    return q


def lin_indep_probability(n: int, k: int) -> Fraction:
    """Probability that k uniform vectors of F_2^n are linearly independent."""
    if k > n:
        return Fraction(0)
    if k < 0:
        raise ValueError("k must be non-negative")
    p = Fraction(1)
    for i in range(n - k + 1, n + 1):
        p *= 1 - Fraction(1, 1 << i)
    return p


@dataclass(frozen=True)
class SubspaceBasis:
    """Reduced echelon basis of a subspace.

    Vector ``basis[j]`` has lowest set bit ``pivots[j]``, the pivots are
    strictly increasing and every basis vector is zero on the other
    vectors' pivots.  This makes the basis unique per subspace.
    """

    n: int
    k: int
    basis: tuple[int, ...]

    @classmethod
    def from_vectors(cls, n: int, vectors: Iterable[int]) -> SubspaceBasis:
        """Canonical basis of the span of ``vectors`` (any spanning set)."""
        rows = [v for v in vectors if v]
        out: list[int] = []
        for col in range(n):
            bit = 1 << col
            hit = next((i for i, v in enumerate(rows) if v & bit), None)
            if hit is None:
                continue
            piv = rows.pop(hit)
            rows = [v ^ piv if v & bit else v for v in rows]
            out = [v ^ piv if v & bit else v for v in out]
            out.append(piv)
        rows = [v for v in rows if v]
        assert not rows
        return cls(n, len(out), tuple(out))

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((b & -b).bit_length() - 1 for b in self.basis)

    @property
    def pivot_mask(self) -> int:
        m = 0
        for b in self.basis:
            m |= b & -b
        return m

    def span(self) -> list[int]:
        pts = [0]
        for b in self.basis:
            pts += [p ^ b for p in pts]
        return pts

    def reduce(self, x: int) -> int:
        """Canonical representative of the coset x + span."""
        for b in self.basis:
            if x & (b & -b):
                x ^= b
        return x

    def __contains__(self, x: int) -> bool:
        return self.reduce(x) == 0


@dataclass(frozen=True)
class AffineSpace:
    offset: int
    space: SubspaceBasis

    @classmethod
    def from_tuple(cls, n: int, u0: int, us: Sequence[int]) -> AffineSpace:
        space = SubspaceBasis.from_vectors(n, us)
        return cls(space.reduce(u0), space)

    def points(self) -> list[int]:
        return [self.offset ^ p for p in self.space.span()]

    def __len__(self) -> int:
        return 1 << self.space.k


def tuples_per_affine_space(k: int) -> int:
    """Ordered (u0, u1..uk) tuples producing one fixed k-dim affine space."""
    return (1 << k) * count_invertible(k)


def _free_positions(n: int, pivots: Sequence[int]) -> list[list[int]]:
    pset = set(pivots)
    return [[q for q in range(p + 1, n) if q not in pset] for p in pivots]


def enumerate_subspaces(n: int, k: int) -> Iterator[SubspaceBasis]:
    """Every k-dim subspace of F_2^n once, in canonical form.

    Order: pivot sets lexicographically, then free coordinates counted in
    binary (first basis vector's free bits least significant).
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    for pivots in itertools.combinations(range(n), k):
        free = _free_positions(n, pivots)
        slots = [(j, q) for j, qs in enumerate(free) for q in qs]
        for word in range(1 << len(slots)):
            basis = [1 << p for p in pivots]
            for s, (j, q) in enumerate(slots):
                if word >> s & 1:
                    basis[j] |= 1 << q
            yield SubspaceBasis(n, k, tuple(basis))


def iter_subspace_blocks(n: int, k: int, max_rows: int = 1 << 18) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream (bases, pivot_masks) arrays in the order of ``enumerate_subspaces``."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    for pivots in itertools.combinations(range(n), k):
        free = _free_positions(n, pivots)
        slots = [(j, q) for j, qs in enumerate(free) for q in qs]
        pmask = sum(1 << p for p in pivots)
        total = 1 << len(slots)
        for lo in range(0, total, max_rows):
            words = np.arange(lo, min(total, lo + max_rows), dtype=np.int64)
            bases = np.empty((words.size, k), dtype=np.int64)
            for j, p in enumerate(pivots):
                bases[:, j] = 1 << p
            for s, (j, q) in enumerate(slots):
                bases[:, j] |= ((words >> s) & 1) << q
            yield bases, np.full(words.size, pmask, dtype=np.int64)


@lru_cache(maxsize=16)
def subspace_array(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All canonical bases of (n, k) as one array pair; cached, read-only."""
    blocks = list(iter_subspace_blocks(n, k))
    bases = np.concatenate([b for b, _ in blocks])
    masks = np.concatenate([m for _, m in blocks])
    bases.setflags(write=False)
    masks.setflags(write=False)
    return bases, masks


def coset_transversal(s: SubspaceBasis) -> list[int]:
    """One canonical offset per coset: the points with zeros on all pivots."""
    pm = s.pivot_mask
    return [x for x in range(1 << s.n) if not x & pm]


def random_invertible(n: int, rng: np.random.Generator) -> GF2Matrix:
    """Uniform element of GL(n, F_2) by rejection sampling."""
    _check_n(n)
    while True:
        cols = tuple(int(c) for c in rng.integers(0, 1 << n, size=n))
        if gf2_rank(cols) == n:
            return GF2Matrix(n, cols)
