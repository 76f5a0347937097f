"""Hot loops: XOR sums of a truth table over affine spaces.

Every kernel exists twice, once as a numba ``@njit`` loop and once as a
vectorised numpy routine.  The module-level names dispatch to the numba
versions unless ``DEGPROBE_NO_NUMBA`` is set to a non-empty value other
than ``0`` (or numba cannot be imported), in which case the numpy
versions are used.  Both variants stay importable under ``numba_*`` and
``numpy_*`` names so they can be benchmarked and cross-checked.

Truth tables are 1-D ``uint8`` arrays of 0/1 values indexed by point.
Points and basis vectors are unsigned integers, bit ``i`` being x_{i+1}.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("DEGPROBE_NO_NUMBA", "")
_want_numba = _flag in ("", "0")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _want_numba
BACKEND = "numba" if USE_NUMBA else "numpy"

# numpy fallbacks materialise (chunk, 2**k) index blocks; keep them modest
_CHUNK_POINTS = 1 << 22


def _njit(fn):
    if not HAVE_NUMBA:  # pragma: no cover
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# Moebius transform
# ---------------------------------------------------------------------------


def _moebius_loop(a, n):
    size = 1 << n
    for i in range(n):
        step = 1 << i
        for x in range(size):
            if x & step:
                a[x] ^= a[x ^ step]
    return a


numba_moebius = _njit(_moebius_loop)


def numpy_moebius(a, n):
    """In-place butterfly; ``a`` may carry leading batch axes."""
    lead = a.shape[:-1]
    for i in range(n):
        view = a.reshape(lead + (-1, 2, 1 << i))
        view[..., 1, :] ^= view[..., 0, :]
    return a


# ---------------------------------------------------------------------------
# Subspace sums (exact add_k and the homogeneous dt_k path)
# ---------------------------------------------------------------------------


def _affine_failures_loop(tt, bases, pivmasks, n, k):
    size = 1 << n
    span = np.zeros(1 << k, dtype=np.int64)
    total = 0
    for s in range(bases.shape[0]):
        for j in range(k):
            b = np.int64(bases[s, j])
            half = 1 << j
            for i in range(half):
                span[half + i] = span[i] ^ b
        pm = np.int64(pivmasks[s])
        for x in range(size):
            if x & pm:
                continue
            acc = 0
            for i in range(1 << k):
                acc ^= tt[x ^ span[i]]
            total += acc
    return total


def _linear_failures_loop(tt, bases, k):
    span = np.zeros(1 << k, dtype=np.int64)
    total = 0
    for s in range(bases.shape[0]):
        acc = tt[0]
        for j in range(k):
            b = np.int64(bases[s, j])
            half = 1 << j
            for i in range(half):
                v = span[i] ^ b
                span[half + i] = v
                acc ^= tt[v]
        total += acc
    return total


numba_affine_failures = _njit(_affine_failures_loop)
numba_linear_failures = _njit(_linear_failures_loop)


def _spans(bases, k):
    """(S, 2**k) array listing every point of each span, in Gray-free order."""
    s = bases.shape[0]
    span = np.zeros((s, 1 << k), dtype=np.int64)
    for j in range(k):
        half = 1 << j
        span[:, half : 2 * half] = span[:, :half] ^ bases[:, j : j + 1].astype(np.int64)
    return span


def numpy_linear_failures(tt, bases, k):
    total = 0
    step = max(1, _CHUNK_POINTS >> k)
    for lo in range(0, bases.shape[0], step):
        span = _spans(bases[lo : lo + step], k)
        total += int(np.bitwise_xor.reduce(tt[span], axis=1).sum())
    return total


def numpy_affine_failures(tt, bases, pivmasks, n, k):
    xs = np.arange(1 << n, dtype=np.int64)
    total = 0
    step = max(1, _CHUNK_POINTS >> (n + k))
    for lo in range(0, bases.shape[0], step):
        span = _spans(bases[lo : lo + step], k)
        pm = pivmasks[lo : lo + step].astype(np.int64)
        sums = np.bitwise_xor.reduce(tt[xs[None, :, None] ^ span[:, None, :]], axis=2)
        canonical = (xs[None, :] & pm[:, None]) == 0
        total += int(sums[canonical].sum())
    return total


# ---------------------------------------------------------------------------
# Tuple sums (brute-force dt_k and Monte-Carlo runs)
# ---------------------------------------------------------------------------


def _tuple_failures_loop(tt, n, k):
    mask = (1 << n) - 1
    span = np.zeros(1 << k, dtype=np.int64)
    total = 0
    for t in range(1 << ((k + 1) * n)):
        u0 = t & mask
        for j in range(k):
            b = (t >> (n * (j + 1))) & mask
            half = 1 << j
            for i in range(half):
                span[half + i] = span[i] ^ b
        acc = 0
        for i in range(1 << k):
            acc ^= tt[u0 ^ span[i]]
        total += acc
    return total


def _sample_failures_loop(tt, tuples, k):
    span = np.zeros(1 << k, dtype=np.int64)
    total = 0
    for r in range(tuples.shape[0]):
        u0 = np.int64(tuples[r, 0])
        for j in range(k):
            b = np.int64(tuples[r, j + 1])
            half = 1 << j
            for i in range(half):
                span[half + i] = span[i] ^ b
        acc = 0
        for i in range(1 << k):
            acc ^= tt[u0 ^ span[i]]
        total += acc
    return total


numba_tuple_failures = _njit(_tuple_failures_loop)
numba_sample_failures = _njit(_sample_failures_loop)


def numpy_sample_failures(tt, tuples, k):
    total = 0
    step = max(1, _CHUNK_POINTS >> k)
    for lo in range(0, tuples.shape[0], step):
        block = tuples[lo : lo + step].astype(np.int64)
        pts = block[:, :1] ^ _spans(block[:, 1:], k)
        total += int(np.bitwise_xor.reduce(tt[pts], axis=1).sum())
    return total


def numpy_tuple_failures(tt, n, k):
    mask = (1 << n) - 1
    shifts = np.arange(k + 1, dtype=np.int64) * n
    total = 0
    count = 1 << ((k + 1) * n)
    step = max(1, _CHUNK_POINTS >> k)
    for lo in range(0, count, step):
        t = np.arange(lo, min(count, lo + step), dtype=np.int64)
        tuples = (t[:, None] >> shifts[None, :]) & mask
        total += numpy_sample_failures(tt, tuples, k)
    return total


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _as_table(tt):
    return np.ascontiguousarray(tt, dtype=np.uint8)


def moebius(a, n):
    """Apply the Moebius butterfly to ``a`` in place and return it."""
    if USE_NUMBA and a.ndim == 1:
        return numba_moebius(a, n)
    return numpy_moebius(a, n)


def affine_failures(tt, bases, pivmasks, n, k):
    """Number of (subspace, canonical coset offset) pairs whose XOR sum is 1."""
    tt = _as_table(tt)
    bases = np.ascontiguousarray(bases, dtype=np.int64).reshape(-1, k)
    pivmasks = np.ascontiguousarray(pivmasks, dtype=np.int64)
    if USE_NUMBA:
        return int(numba_affine_failures(tt, bases, pivmasks, n, k))
    return numpy_affine_failures(tt, bases, pivmasks, n, k)


def linear_failures(tt, bases, k):
    """Number of subspaces (rows of ``bases``) over which ``tt`` sums to 1."""
    tt = _as_table(tt)
    bases = np.ascontiguousarray(bases, dtype=np.int64).reshape(-1, k)
    if USE_NUMBA:
        return int(numba_linear_failures(tt, bases, k))
    return numpy_linear_failures(tt, bases, k)


def tuple_failures(tt, n, k):
    """Failing tuples among all 2**((k+1)n) choices of (u0, u1, ..., uk)."""
    tt = _as_table(tt)
    if USE_NUMBA:
        return int(numba_tuple_failures(tt, n, k))
    return numpy_tuple_failures(tt, n, k)


def sample_failures(tt, tuples, k):
    """Failing rows of ``tuples``; row layout is (u0, u1, ..., uk)."""
    tt = _as_table(tt)
    tuples = np.ascontiguousarray(tuples, dtype=np.int64).reshape(-1, k + 1)
    if USE_NUMBA:
        return int(numba_sample_failures(tt, tuples, k))
    return numpy_sample_failures(tt, tuples, k)
