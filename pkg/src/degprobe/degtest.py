"""The deg(f) < k test: single runs, exact failure probabilities, estimators.

Exact quantities are ``fractions.Fraction`` values.  Three independent
routes to dt_k(f) are provided:

* ``exact_dt_tuples``: brute force over every (u0, u1, ..., uk);
* ``exact_add`` + ``dt_from_add``: one canonical basis per k-dim subspace,
  every coset offset;
* ``dt_by_derivative_recursion``: dt_k(f) = 2^-n sum_u dt_{k-1}(D_u f).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

import numpy as np

from . import kernels
from .boolfun import (
    Anf,
    BlackBox,
    BoolFunction,
    TruthTable,
    all_derivatives,
    batch_degrees,
    moebius,
    truth_table,
)
from .gf2 import count_invertible, gaussian_binomial, iter_subspace_blocks, lin_indep_probability, subspace_array

# printed six-digit value of prod_{i>=1} (1 - 2^-i)
POCHHAMMER_FLOOR = 0.288788

MAX_TUPLE_BITS = 24
MAX_SUBSPACE_WORK = 1 << 34
MAX_RECURSION_N = 12
ESTIMATE_CHUNK = 1 << 16

# cache whole subspace arrays up to this many rows; stream beyond
_CACHE_ROWS = 1 << 21


class CostGuardError(ValueError):
    """Raised when an exact method would exceed its work budget."""

    def __init__(self, method: str, cost: int, limit: int):
        super().__init__(
            f"{method}: about 2^{math.log2(max(cost, 1)):.1f} evaluations exceeds limit 2^{math.log2(limit):.1f}"
        )
        self.method = method
        self.cost = cost
        self.limit = limit


@dataclass(frozen=True)
class TestTuple:
    """(u0, u1, ..., uk); the us need not be independent."""

    __test__ = False

    u0: int
    us: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.us)


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    trials: int
    stderr: float
    seed: int
    failures: int


class Verdict(enum.Enum):
    DEG_LESS_THAN_K = "DegLessThanK"
    DEG_AT_LEAST_K = "DegAtLeastK"


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    runs_used: int
    failures: int
    false_positive_bound: float


@dataclass(frozen=True)
class BoundPair:
    lower: Fraction
    upper: Fraction
    n: int
    k: int


def to_decimal(p: Fraction, digits: int = 6) -> Decimal:
    """Round an exact rational half-to-even at ``digits`` decimals."""
    p = Fraction(p)
    q, r = divmod(p.numerator * 10**digits, p.denominator)
    if 2 * r > p.denominator or (2 * r == p.denominator and q % 2):
        q += 1
    return Decimal(q).scaleb(-digits)


def fmt(p: Fraction, digits: int = 6) -> str:
    return f"{to_decimal(p, digits):.{digits}f}"


def fmt_rational(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _table(f: BoolFunction) -> TruthTable:
    if isinstance(f, BlackBox) and f.n > 16:
        raise ValueError("exact methods need n <= 16")
    return truth_table(f)


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


# ---------------------------------------------------------------------------
# single runs
# ---------------------------------------------------------------------------


def run_test(f, t: TestTuple) -> bool:
    """One deg(f) < k test; True when f passes (the XOR sum is 0).

    Makes exactly 2**k calls to ``f``.
    """
    pts = [t.u0]
    for u in t.us:
        pts += [p ^ u for p in pts]
    acc = 0
    for p in pts:
        acc ^= f(p) & 1
    return acc == 0


# ---------------------------------------------------------------------------
# exact computations
# ---------------------------------------------------------------------------


def failing_tuples(f: BoolFunction, k: int, max_bits: int = MAX_TUPLE_BITS) -> int:
    tt = _table(f)
    _check_k(tt.n, k)
    bits = (k + 1) * tt.n
    if bits > max_bits:
        raise CostGuardError("tuples", 1 << (bits + k), 1 << (max_bits + k))
    return kernels.tuple_failures(tt.bits, tt.n, k)


def exact_dt_tuples(f: BoolFunction, k: int, max_bits: int = MAX_TUPLE_BITS) -> Fraction:
    """dt_k(f) by counting failing tuples among all 2^((k+1)n)."""
    n = _table(f).n
    return Fraction(failing_tuples(f, k, max_bits), 1 << ((k + 1) * n))


def _subspace_blocks(n: int, k: int):
    if gaussian_binomial(n, k) <= _CACHE_ROWS:
        yield subspace_array(n, k)
    else:
        yield from iter_subspace_blocks(n, k)


def failing_affine_spaces(f: BoolFunction, k: int, max_work: int = MAX_SUBSPACE_WORK) -> int:
    """Number of k-dim affine spaces over which f sums to 1."""
    tt = _table(f)
    _check_k(tt.n, k)
    work = gaussian_binomial(tt.n, k) << tt.n
    if work > max_work:
        raise CostGuardError("subspaces", work, max_work)
    return sum(kernels.affine_failures(tt.bits, b, m, tt.n, k) for b, m in _subspace_blocks(tt.n, k))


def exact_add(f: BoolFunction, k: int, max_work: int = MAX_SUBSPACE_WORK) -> Fraction:
    """add_k(f): failing affine spaces over all gaussian_binomial(n,k) * 2^(n-k)."""
    n = _table(f).n
    _check_k(n, k)
    total = gaussian_binomial(n, k) << (n - k)
    return Fraction(failing_affine_spaces(f, k, max_work), total)


def dt_from_add(add: Fraction, n: int, k: int) -> Fraction:
    return Fraction(add) * lin_indep_probability(n, k)


def add_from_dt(dt: Fraction, n: int, k: int) -> Fraction:
    return Fraction(dt) / lin_indep_probability(n, k)


def failing_subspaces(f: BoolFunction, k: int, check: bool = True, max_work: int = MAX_SUBSPACE_WORK) -> int:
    """Number of k-dim linear subspaces over which f sums to 1.

    Only meaningful as a dt_k route when deg(f) == k, which is verified
    unless ``f`` is a black box or ``check`` is False.
    """
    tt = _table(f)
    _check_k(tt.n, k)
    if check and not isinstance(f, BlackBox):
        d = (f if isinstance(f, Anf) else moebius(tt)).degree()
        if d != k:
            raise ValueError(f"homogeneous path needs deg(f) == {k}, got {d}")
    work = gaussian_binomial(tt.n, k) << k
    if work > max_work:
        raise CostGuardError("homogeneous", work, max_work)
    return sum(kernels.linear_failures(tt.bits, b, k) for b, _ in _subspace_blocks(tt.n, k))


def exact_add_homogeneous(f: BoolFunction, k: int, check: bool = True) -> Fraction:
    """add_k(f) for deg(f) == k from linear subspaces only."""
    n = _table(f).n
    return Fraction(failing_subspaces(f, k, check), gaussian_binomial(n, k))


def exact_dt_homogeneous(f: BoolFunction, k: int, check: bool = True) -> Fraction:
    """dt_k(f) for deg(f) == k, with u0 fixed to 0.

    Each failing subspace accounts for |GL(k)| ordered bases.
    """
    n = _table(f).n
    fails = failing_subspaces(f, k, check)
    return Fraction(fails * count_invertible(k), 1 << (k * n))


def dt_by_derivative_recursion(f: BoolFunction, k: int, skip_low_degree: bool = True) -> Fraction:
    """dt_k(f) = 2^-n sum_u dt_{k-1}(D_u f), memoised on derivative tables.

    Base case k = 1 is the affine test f(u0) + f(u0 + u1): probability
    2 w (1 - w) with w the normalised weight.  With ``skip_low_degree``,
    directions whose derivative has degree < k - 1 are skipped since they
    contribute zero.
    """
    tt = _table(f)
    n = tt.n
    _check_k(n, k)
    if n > MAX_RECURSION_N:
        raise CostGuardError("recursion", 1 << (n * k), 1 << (MAX_RECURSION_N * k))
    memo: dict[tuple[bytes, int], int] = {}
    size = 1 << n

    # count_k(g) = dt_k(g) * 2^((k+1)n), an integer
    def count(bits: np.ndarray, j: int) -> int:
        key = (bits.tobytes(), j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if j == 1:
            w = int(bits.sum())
            out = 2 * w * (size - w)
        else:
            ders = all_derivatives(TruthTable(n, bits))[1:]
            if skip_low_degree:
                ders = ders[batch_degrees(ders, n) >= j - 1]
            out = sum(count(row, j - 1) for row in ders)
        memo[key] = out
        return out

    return Fraction(count(tt.bits, k), 1 << ((k + 1) * n))


def exact_dt(f: BoolFunction, k: int, method: str = "auto") -> Fraction:
    """dt_k(f) via ``tuples``, ``subspaces``, ``homogeneous``, ``recursion`` or ``auto``."""
    if method == "tuples":
        return exact_dt_tuples(f, k)
    if method == "subspaces":
        tt = _table(f)
        return dt_from_add(exact_add(tt, k), tt.n, k)
    if method == "homogeneous":
        return exact_dt_homogeneous(f, k)
    if method == "recursion":
        return dt_by_derivative_recursion(f, k)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    tt = _table(f)
    _check_k(tt.n, k)
    d = moebius(tt).degree()
    if d is None or d < k:
        return Fraction(0)
    if d == k:
        return exact_dt_homogeneous(tt, k, check=False)
    return dt_from_add(exact_add(tt, k), tt.n, k)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _independent_rows(us: np.ndarray, k: int) -> np.ndarray:
    span = np.zeros((us.shape[0], 1 << k), dtype=np.int64)
    for j in range(k):
        half = 1 << j
        span[:, half : 2 * half] = span[:, :half] ^ us[:, j : j + 1]
    return (span[:, 1:] != 0).all(axis=1)


def sample_tuples(n: int, k: int, count: int, rng: np.random.Generator, independent: bool = False) -> np.ndarray:
    """(count, k+1) array of uniform tuples (u0, u1, ..., uk)."""
    out = rng.integers(0, 1 << n, size=(count, k + 1), dtype=np.int64)
    if independent:
        if k > n:
            raise ValueError("no independent k-tuples when k > n")
        bad = ~_independent_rows(out[:, 1:], k)
        while bad.any():
            out[bad, 1:] = rng.integers(0, 1 << n, size=(int(bad.sum()), k), dtype=np.int64)
            bad = ~_independent_rows(out[:, 1:], k)
    return out


def _chunk_failures(f, tt, n, k, count, seed, index, independent):
    tuples = sample_tuples(n, k, count, _rng(seed, index), independent)
    if tt is not None:
        return kernels.sample_failures(tt.bits, tuples, k)
    return sum(not run_test(f, TestTuple(int(r[0]), tuple(int(u) for u in r[1:]))) for r in tuples)


def estimate_dt(
    f: BoolFunction,
    k: int,
    trials: int,
    seed: int,
    independent: bool = False,
    workers: int = 1,
) -> Estimate:
    """Monte-Carlo dt_k(f) (or add_k(f) with ``independent``).

    Trials are split into fixed chunks of ``ESTIMATE_CHUNK``; chunk i draws
    from SeedSequence(seed, spawn_key=(i,)), so the result depends only on
    the seed, never on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = f.n
    if not 1 <= k:
        raise ValueError("k must be >= 1")
    tt = None if isinstance(f, BlackBox) else truth_table(f)
    sizes = [min(ESTIMATE_CHUNK, trials - lo) for lo in range(0, trials, ESTIMATE_CHUNK)]
    jobs = [(f, tt, n, k, c, seed, i, independent) for i, c in enumerate(sizes)]
    if workers > 1 and tt is not None:
        with ThreadPoolExecutor(workers) as pool:
            fails = sum(pool.map(lambda a: _chunk_failures(*a), jobs))
    else:
        fails = sum(_chunk_failures(*a) for a in jobs)
    p = fails / trials
    return Estimate(p, trials, math.sqrt(p * (1 - p) / trials), seed, fails)


def false_positive_bound(t: int) -> float:
    """Chance a degree-k function passes t independent runs, at worst."""
    return (1 - POCHHAMMER_FLOOR) ** t


def decide(f, k: int, t: int, seed: int) -> Decision:
    """Run up to t tests; stop at the first failure."""
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = _rng(seed, 0)
    for run in range(1, t + 1):
        row = sample_tuples(f.n, k, 1, rng)[0]
        if not run_test(f, TestTuple(int(row[0]), tuple(int(u) for u in row[1:]))):
            return Decision(Verdict.DEG_AT_LEAST_K, run, 1, 0.0)
    return Decision(Verdict.DEG_LESS_THAN_K, t, 0, false_positive_bound(t))


# ---------------------------------------------------------------------------
# closed forms and transfer rules
# ---------------------------------------------------------------------------


def _partial(lo: int, hi: int) -> Fraction:
    """prod_{i=lo}^{hi} (1 - 2^-i); empty product is 1."""
    p = Fraction(1)
    for i in range(lo, hi + 1):
        p *= 1 - Fraction(1, 1 << i)
    return p


def closed_form_dt(form: str, k: int, t: int = 0) -> Fraction:
    """dt for ``monomial`` x1..xk, ``two_monomials`` x1..xk + x_{k+1}..x_{2k},
    or ``product_extension`` x_{2k+1}..x_{2k+t}(x1..xk + x_{k+1}..x_{2k}).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    mono = _partial(1, k)
    if form == "monomial":
        return mono
    if form == "two_monomials":
        return 2 * mono * (1 - mono)
    if form == "product_extension":
        if t < 0:
            raise ValueError("t must be >= 0")
        return 2 * _partial(1, k + t) * (1 - mono)
    raise ValueError(f"unknown form {form!r}")


def compose_dt_disjoint(p1: Fraction, p2: Fraction) -> Fraction:
    """dt of g1 + g2 on disjoint variables from dt(g1), dt(g2)."""
    return p1 + p2 - 2 * p1 * p2


def lift_multiply_new_var(p: Fraction, k: int) -> Fraction:
    """dt_{k+1}(x_{n+1} f) from dt_k(f), deg f = k."""
    return (1 - Fraction(1, 1 << (k + 1))) * p


def complement_factor(n: int, k: int) -> Fraction:
    """prod_{i=k+1}^{n-k} (1 - 2^-i)."""
    if not 1 <= k <= n // 2:
        raise ValueError(f"complement transfer needs 1 <= k <= n/2, got n={n}, k={k}")
    return _partial(k + 1, n - k)


def complement_transfer(dt_k_val: Fraction, n: int, k: int) -> Fraction:
    """dt_{n-k}(f^c) from dt_k(f) for homogeneous f of degree k <= n/2.

    add_{n-k}(f^c) equals add_k(f), so no companion conversion is needed.
    """
    return Fraction(dt_k_val) * complement_factor(n, k)


def bounds(n: int, k: int) -> BoundPair:
    """Lower and upper bounds on dt_k(f) for deg f = k."""
    _check_k(n, k)
    upper = Fraction(1, 2) * (1 - Fraction(1, 1 << n)) ** (k - 1)
    return BoundPair(_partial(1, k), upper, n, k)


def pochhammer_floor(precision: int = 6) -> Decimal:
    """prod_{i>=1} (1 - 2^-i) rounded half-even to ``precision`` digits."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    with localcontext() as ctx:
        ctx.prec = precision + 20
        tol = Decimal(10) ** -(precision + 2)
        p = Decimal(1)
        i = 1
        while True:
            step = p / (Decimal(2) ** i)
            p -= step
            i += 1
            # remaining factors shrink p by less than 2 * step / 2
            if step < tol:
                break
        return p.quantize(Decimal(10) ** -precision, rounding=ROUND_HALF_EVEN)


__all__ = [
    "BoundPair",
    "CostGuardError",
    "Decision",
    "Estimate",
    "TestTuple",
    "Verdict",
    "add_from_dt",
    "bounds",
    "closed_form_dt",
    "complement_factor",
    "complement_transfer",
    "compose_dt_disjoint",
    "decide",
    "dt_by_derivative_recursion",
    "dt_from_add",
    "estimate_dt",
    "exact_add",
    "exact_add_homogeneous",
    "exact_dt",
    "exact_dt_homogeneous",
    "exact_dt_tuples",
    "false_positive_bound",
    "fmt",
    "lift_multiply_new_var",
    "pochhammer_floor",
    "run_test",
    "sample_tuples",
    "to_decimal",
]
