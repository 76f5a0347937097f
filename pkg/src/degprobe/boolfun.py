"""Boolean functions as truth tables, ANF monomial sets and black boxes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Callable, Iterable, Union

import numpy as np

from . import kernels
from .gf2 import GF2Matrix, popcount

MAX_TABLE_N = 16


class AnfParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Outputs f(0), f(1), ..., f(2**n - 1), one uint8 per point."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_TABLE_N:
            raise ValueError(f"truth tables support n <= {MAX_TABLE_N}")
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.shape != (1 << self.n,):
            raise ValueError(f"truth table for n={self.n} needs {1 << self.n} entries")
        if bits.size and bits.max() > 1:
            raise ValueError("truth table entries must be 0 or 1")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __call__(self, x: int) -> int:
        return int(self.bits[x])

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    @classmethod
    def zeros(cls, n: int) -> TruthTable:
        return cls(n, np.zeros(1 << n, dtype=np.uint8))

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[int], int]) -> TruthTable:
        return cls(n, np.fromiter((fn(x) & 1 for x in range(1 << n)), dtype=np.uint8, count=1 << n))

    def weight(self) -> int:
        return int(self.bits.sum())

    def to_bitstring(self) -> str:
        return "".join("01"[b] for b in self.bits)

    def to_hex(self) -> str:
        if self.n < 2:
            raise ValueError("hex encoding needs n >= 2")
        nib = self.bits.reshape(-1, 4).astype(np.int64) @ np.array([1, 2, 4, 8])
        return "".join("0123456789abcdef"[v] for v in nib)


@dataclass(frozen=True)
class Anf:
    """Set of monomials; bit ``i`` of a mask is variable x_{i+1}."""

    n: int
    monomials: frozenset[int] = frozenset()

    def __post_init__(self):
        mons = frozenset(self.monomials)
        limit = 1 << self.n
        if any(not 0 <= m < limit for m in mons):
            raise ValueError(f"monomial uses a variable beyond x{self.n}")
        object.__setattr__(self, "monomials", mons)

    def __call__(self, x: int) -> int:
        return sum(1 for m in self.monomials if x & m == m) & 1

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def degree(self) -> int | None:
        """Algebraic degree, or ``None`` for the zero function."""
        if not self.monomials:
            return None
        return max(popcount(m) for m in self.monomials)

    def count(self, k: int) -> int:
        return sum(1 for m in self.monomials if popcount(m) == k)

    def is_homogeneous(self) -> bool:
        return len({popcount(m) for m in self.monomials}) <= 1

    def extend(self, n: int) -> Anf:
        """Same polynomial viewed in ``n >= self.n`` variables."""
        if n < self.n:
            raise ValueError("cannot drop variables")
        return Anf(n, self.monomials)

    def __str__(self):
        return format_anf(self)


class BlackBox:
    """Evaluation-only access to f, with a call counter."""

    def __init__(self, n: int, fn: Callable[[int], int]):
        self.n = n
        self._fn = fn
        self.calls = 0

    def __call__(self, x: int) -> int:
        self.calls += 1
        return self._fn(x) & 1


BoolFunction = Union[TruthTable, Anf, BlackBox]


@dataclass(frozen=True)
class AffineMap:
    """x -> M x + v with M invertible."""

    m: GF2Matrix
    v: int = 0

    def __post_init__(self):
        if not self.m.invertible:
            raise ValueError("affine map needs an invertible matrix")
        if not 0 <= self.v < (1 << self.m.n):
            raise ValueError("offset outside F_2^n")

    @property
    def n(self) -> int:
        return self.m.n

    def __call__(self, x: int) -> int:
        return self.m.apply(x) ^ self.v

    def image_table(self) -> np.ndarray:
        return self.m.image_table() ^ self.v


# ---------------------------------------------------------------------------
# representation changes
# ---------------------------------------------------------------------------


def moebius(tt: TruthTable) -> Anf:
    coeffs = kernels.moebius(tt.bits.copy(), tt.n)
    return Anf(tt.n, frozenset(int(m) for m in np.flatnonzero(coeffs)))


def anf_to_tt(a: Anf) -> TruthTable:
    coeffs = np.zeros(1 << a.n, dtype=np.uint8)
    coeffs[list(a.monomials)] = 1
    return TruthTable(a.n, kernels.moebius(coeffs, a.n))


def truth_table(f: BoolFunction) -> TruthTable:
    """Materialise any representation as a truth table (2**n evaluations)."""
    if isinstance(f, TruthTable):
        return f
    if isinstance(f, Anf):
        return anf_to_tt(f)
    return TruthTable.from_callable(f.n, f)


def to_anf(f: BoolFunction) -> Anf:
    if isinstance(f, Anf):
        return f
    return moebius(truth_table(f))


def degree(f: BoolFunction) -> int | None:
    return to_anf(f).degree()


def batch_degrees(tables: np.ndarray, n: int) -> np.ndarray:
    """Degree of each row of a (rows, 2**n) 0/1 array; -1 marks the zero row."""
    coeffs = kernels.numpy_moebius(np.array(tables, dtype=np.uint8), n)
    weights = np.array([popcount(m) for m in range(1 << n)], dtype=np.int64)
    return np.where(coeffs.any(axis=1), (coeffs * weights).max(axis=1), -1)


def _like(f: BoolFunction, tt: TruthTable) -> BoolFunction:
    if isinstance(f, Anf):
        return moebius(tt)
    if isinstance(f, BlackBox):
        return BlackBox(tt.n, tt)
    return tt


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def coefficient(f: Callable[[int], int], support: Iterable[int]) -> int:
    """ANF coefficient of prod_{i in support} x_i from 2**|support| evaluations.

    ``support`` holds 1-based variable indices.
    """
    pts = [0]
    for i in sorted(set(support)):
        if i < 1:
            raise ValueError("variable indices are 1-based")
        pts += [p | 1 << (i - 1) for p in pts]
    acc = 0
    for p in pts:
        acc ^= f(p) & 1
    return acc


def dd_k(a: Anf, k: int) -> Fraction:
    """Fraction of the C(n, k) degree-k monomials present in ``a``."""
    if not 0 <= k <= a.n:
        raise ValueError(f"need 0 <= k <= n, got k={k}")
    return Fraction(a.count(k), comb(a.n, k))


def compose_affine(f: BoolFunction, phi: AffineMap) -> BoolFunction:
    """g(x) = f(M x + v), returned in the representation of ``f``."""
    tt = truth_table(f)
    if phi.n != tt.n:
        raise ValueError("dimension mismatch")
    return _like(f, TruthTable(tt.n, tt.bits[phi.image_table()]))


def derivative(f: BoolFunction, a: int) -> BoolFunction:
    """D_a f(x) = f(x + a) + f(x); a = 0 gives the zero function."""
    tt = truth_table(f)
    xs = np.arange(1 << tt.n)
    return _like(f, TruthTable(tt.n, tt.bits[xs ^ a] ^ tt.bits))


def all_derivatives(tt: TruthTable) -> np.ndarray:
    """Row ``a`` is the truth table of D_a f."""
    xs = np.arange(1 << tt.n)
    return tt.bits[xs[:, None] ^ xs[None, :]] ^ tt.bits[None, :]


def fast_points(f: BoolFunction) -> set[int]:
    """Nonzero a with deg(D_a f) < deg(f) - 1."""
    tt = truth_table(f)
    k = moebius(tt).degree()
    if k is None or k == 0:
        raise ValueError("fast points need a non-constant function")
    degs = batch_degrees(all_derivatives(tt), tt.n)
    return {a for a in range(1, 1 << tt.n) if degs[a] < k - 1}


def complement(a: Anf) -> Anf:
    """Swap every degree-k monomial t for x_1...x_n / t."""
    if not a.is_homogeneous():
        raise ValueError("complement needs a homogeneous polynomial")
    full = (1 << a.n) - 1
    return Anf(a.n, frozenset(full ^ m for m in a.monomials))


def disjoint_sum(f: Anf, g: Anf) -> Anf:
    """f(x_1..x_n) + g(x_{n+1}..x_{n+m}) in n + m variables."""
    shifted = frozenset(m << f.n for m in g.monomials)
    return Anf(f.n + g.n, f.monomials ^ shifted)


def product(f: Anf, g: Anf) -> Anf:
    """Product of two polynomials in the same variables."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    out: set[int] = set()
    for a in f.monomials:
        for b in g.monomials:
            out ^= {a | b}
    return Anf(f.n, frozenset(out))


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<plus>[+⊕])|(?P<star>\*)|x(?P<var>\d+)|(?P<const>[01])(?!\d))")


def parse_anf(text: str, n: int | None = None) -> Anf:
    """Parse ``"x1x2x7 + x3x4x7"``-style text.

    ``n`` defaults to the largest variable index present.  Repeated
    variables inside a term collapse and repeated terms cancel.
    """
    terms: list[int] = []
    cur: int | None = None
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text) - len(text[pos:].lstrip())
            raise AnfParseError(f"unexpected {text[stripped]!r}", stripped)
        tok_pos = m.start(m.lastgroup)
        if m.lastgroup == "var":
            tok_pos -= 1  # point at the 'x'
        if m.group("plus"):
            if cur is None:
                raise AnfParseError("empty term", tok_pos)
            terms.append(cur)
            cur = None
        elif m.group("star"):
            if cur is None or cur < 0:
                raise AnfParseError("'*' must join variables", tok_pos)
        elif m.group("var") is not None:
            idx = int(m.group("var"))
            if idx < 1 or (n is not None and idx > n):
                raise AnfParseError(f"variable x{idx} out of range", tok_pos)
            if cur is not None and cur < 0:
                raise AnfParseError("constant cannot be multiplied", tok_pos)
            cur = (cur or 0) | 1 << (idx - 1)
        else:
            if cur is not None:
                raise AnfParseError("constant inside a product", tok_pos)
            # -1 marks the constant 1, -2 the constant 0
            cur = -1 if m.group("const") == "1" else -2
        pos = m.end()
    if cur is None:
        raise AnfParseError("empty term" if terms else "empty expression", end)
    terms.append(cur)

    mons: set[int] = set()
    for t in terms:
        if t == -2:
            continue
        mons ^= {0 if t == -1 else t}
    width = max((m.bit_length() for m in mons), default=0)
    if n is None:
        n = max(width, 1)
    return Anf(n, frozenset(mons))


def _mon_key(m: int) -> tuple:
    return (-popcount(m), [i for i in range(m.bit_length()) if m >> i & 1])


def format_anf(a: Anf) -> str:
    if not a.monomials:
        return "0"
    parts = []
    for m in sorted(a.monomials, key=_mon_key):
        if m == 0:
            parts.append("1")
        else:
            parts.append("".join(f"x{i + 1}" for i in range(m.bit_length()) if m >> i & 1))
    return " + ".join(parts)


def read_truth_table(path: str | Path, hex_mode: bool = False) -> TruthTable:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    return parse_truth_table("\n".join(lines), hex_mode)


def parse_truth_table(text: str, hex_mode: bool = False) -> TruthTable:
    """First line ``n=<int>``, second line the table as 0/1 chars or hex."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError("truth table file needs 'n=<int>' then one data line")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"bad header {lines[0]!r}") from None
    data = lines[1]
    if hex_mode:
        if n < 2 or len(data) != (1 << n) // 4:
            raise ValueError(f"hex table for n={n} needs {(1 << n) // 4} digits")
        try:
            nibbles = [int(c, 16) for c in data]
        except ValueError:
            raise ValueError("non-hex digit in table") from None
        bits = [(v >> b) & 1 for v in nibbles for b in range(4)]
    else:
        if len(data) != 1 << n or set(data) - {"0", "1"}:
            raise ValueError(f"binary table for n={n} needs {1 << n} chars of 0/1")
        bits = [int(c) for c in data]
    return TruthTable(n, np.array(bits, dtype=np.uint8))


def format_truth_table(tt: TruthTable, hex_mode: bool = False) -> str:
    body = tt.to_hex() if hex_mode else tt.to_bitstring()
    return f"n={tt.n}\n{body}\n"
