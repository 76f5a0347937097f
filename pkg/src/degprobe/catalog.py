"""Class representatives in 8 variables, batch sweeps and histograms."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .boolfun import Anf, AnfParseError, complement, dd_k, format_anf, parse_anf
from .degtest import (
    dt_from_add,
    exact_add,
    exact_add_homogeneous,
    fmt,
    fmt_rational,
)


class RepFileError(ValueError):
    def __init__(self, msg: str, lineno: int):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class RepEntry:
    id: str
    n: int
    anf_text: str
    degree: int
    expected_add: str | None = None
    expected_dt: str | None = None
    anf: Anf = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a = parse_anf(self.anf_text, self.n)
        if a.degree() != self.degree:
            raise ValueError(f"{self.id}: declared degree {self.degree}, ANF has {a.degree()}")
        object.__setattr__(self, "anf", a)


@dataclass(frozen=True)
class SweepRow:
    id: str
    n: int
    k: int
    monomials: int
    dd_k: Fraction
    add_k: Fraction
    dt_k: Fraction
    elapsed: float = field(default=0.0, compare=False)
    expected_add: str | None = None
    expected_dt: str | None = None

    def mismatches(self) -> list[str]:
        out = []
        if self.expected_add is not None and fmt(self.add_k) != self.expected_add:
            out.append(f"add_k {fmt(self.add_k)} != {self.expected_add}")
        if self.expected_dt is not None and fmt(self.dt_k) != self.expected_dt:
            out.append(f"dt_k {fmt(self.dt_k)} != {self.expected_dt}")
        return out

    def matches_truncated(self) -> bool:
        """Every expected value agrees once rounding or cutting to 6 d.p."""
        pairs = [(self.add_k, self.expected_add), (self.dt_k, self.expected_dt)]
        return all(e is None or e in (fmt(v), truncate(v)) for v, e in pairs)


def truncate(p: Fraction, digits: int = 6) -> str:
    q = p.numerator * 10**digits // p.denominator
    return f"{q // 10**digits}.{q % 10**digits:0{digits}d}"


@dataclass(frozen=True)
class HistogramSpec:
    mode: str = "bins"  # "bins" or "distinct"
    bins: int = 20
    range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.mode not in ("bins", "distinct"):
            raise ValueError(f"unknown histogram mode {self.mode!r}")
        if self.bins < 1:
            raise ValueError("need at least one bin")


# Degree-3 classes in 8 variables with their printed (add_3, dt_3), in
# increasing dt_3 order.  Labels are the customary class numbers, gaps included.
_DEGREE3 = [
    ("f_2", "x1x2x3", "0.337275", "0.328125"),
    ("f_3", "x1x2x5 + x3x4x5", "0.421594", "0.410156"),
    ("f_7", "x1x2x7 + x3x4x7 + x5x6x7", "0.442674", "0.430664"),
    ("f_4", "x1x2x3 + x4x5x6", "0.453213", "0.440918"),
    ("f_5", "x1x2x3 + x2x4x5 + x3x4x6", "0.463753", "0.451172"),
    ("f_6", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6", "0.474293", "0.461426"),
    ("f_8", "x1x2x3 + x4x5x6 + x1x4x7", "0.474293", "0.461426"),
    ("f_13", "x1x2x3 + x4x5x6 + x1x7x8", "0.482198", "0.469116"),
    ("f_9", "x1x2x3 + x2x4x5 + x3x4x6 + x1x4x7", "0.484833", "0.471680"),
    ("f_10", "x1x2x3 + x4x5x6 + x1x4x7 + x2x5x7", "0.484833", "0.471680"),
    ("f_16", "x1x2x3 + x2x4x5 + x3x4x6 + x3x7x8", "0.484833", "0.471680"),
    ("f_12", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7 + x2x4x7", "0.490103", "0.476807"),
    ("f_14", "x1x2x3 + x4x5x6 + x1x7x8 + x4x7x8", "0.490103", "0.476807"),
    ("f_29", "x1x2x3 + x4x5x6 + x1x4x7 + x3x6x8", "0.490103", "0.476807"),
    ("f_15", "x1x2x3 + x2x4x5 + x6x7x8 + x1x4x7", "0.492738", "0.479370"),
    ("f_11", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7", "0.495373", "0.481934"),
    ("f_17", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x7x8", "0.495373", "0.481934"),
    ("f_24", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7 + x5x6x8", "0.495373", "0.481934"),
    ("f_28", "x1x2x7 + x3x4x7 + x5x6x7 + x2x5x8 + x3x6x8", "0.495373", "0.481934"),
    ("f_31", "x1x2x3 + x4x5x6 + x1x4x7 + x3x6x8 + x4x7x8 + x5x6x8", "0.495373", "0.481934"),
    ("f_18", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7 + x2x3x8", "0.498008", "0.484497"),
    (
        "f_19",
        "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x5x8 + x2x3x7 + x6x7x8",
        "0.498008",
        "0.484497",
    ),
    ("f_26", "x1x2x3 + x4x5x6 + x1x4x7 + x2x5x7 + x2x6x8 + x2x7x8 + x3x4x8", "0.498008", "0.484497"),
    ("f_30", "x1x2x3 + x4x5x6 + x1x4x7 + x3x6x8 + x5x7x8", "0.498008", "0.484497"),
    (
        "f_22",
        "x1x2x3 + x2x3x4 + x3x4x5 + x4x5x6 + x5x6x7 + x6x7x8"
        " + x1x2x8 + x2x3x8 + x3x4x8 + x4x5x8 + x5x6x8 + x1x7x8",
        "0.499326",
        "0.485779",
    ),
    (
        "f_21",
        "x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x2x7x8 + x3x4x7 + x1x6x8 + x2x3x7 + x1x4x7",
        "0.500643",
        "0.487061",
    ),
    ("f_23", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7 + x5x7x8", "0.500643", "0.487061"),
    ("f_25", "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x1x6x7 + x3x4x8", "0.500643", "0.487061"),
    ("f_32", "x1x2x3 + x4x5x6 + x1x4x7 + x1x6x8 + x2x5x8 + x3x4x8", "0.500643", "0.487061"),
    (
        "f_20",
        "x1x2x3 + x1x4x5 + x2x4x6 + x3x5x6 + x4x5x6 + x2x7x8 + x3x4x7 + x1x6x8",
        "0.501960",
        "0.488342",
    ),
    (
        "f_27",
        "x1x2x3 + x4x5x6 + x1x4x7 + x2x5x7 + x1x6x8 + x1x7x8 + x2x4x8 + x3x5x8",
        "0.503278",
        "0.489624",
    ),
]

_DEGREE2 = [
    ("q_1", "x1x2", "0.375000"),
    ("q_2", "x1x2 + x3x4", "0.468750"),
    ("q_3", "x1x2 + x3x4 + x5x6", "0.492188"),
    ("q_4", "x1x2 + x3x4 + x5x6 + x7x8", "0.498047"),
]


def builtin_reps(degree: int, n: int = 8) -> list[RepEntry]:
    """Embedded class representatives for degrees 1-3 in 8 variables.

    Other degrees return an empty list; the degree-4 classes must be
    loaded from a file with ``load_reps``.
    """
    if degree == 1:
        return [RepEntry("f", n, "x1", 1, None, "0.500000")]
    if degree == 2:
        return [RepEntry(i, n, a, 2, None, dt) for i, a, dt in _DEGREE2]
    if degree == 3:
        return [RepEntry(i, n, a, 3, add, dt) for i, a, add, dt in _DEGREE3]
    return []


def parse_reps(text: str, n: int, degree: int | None = None) -> list[RepEntry]:
    """Parse ``id: ANF`` lines; ``#`` starts a comment."""
    out: list[RepEntry] = []
    seen: dict[frozenset, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ident, sep, expr = line.partition(":")
        ident = ident.strip()
        if not sep or not ident:
            raise RepFileError("expected 'id: ANF'", lineno)
        try:
            a = parse_anf(expr, n)
        except AnfParseError as e:
            raise RepFileError(str(e), lineno) from None
        d = a.degree()
        if d is None:
            raise RepFileError(f"{ident} is the zero function", lineno)
        if degree is not None and d != degree:
            raise RepFileError(f"{ident} has degree {d}, expected {degree}", lineno)
        if a.monomials in seen:
            raise RepFileError(f"{ident} duplicates {seen[a.monomials]}", lineno)
        seen[a.monomials] = ident
        out.append(RepEntry(ident, n, format_anf(a), d))
    return out


def load_reps(path: str | Path, n: int = 8, degree: int | None = None) -> list[RepEntry]:
    return parse_reps(Path(path).read_text(encoding="utf-8"), n, degree)


def derive_complement_reps(reps: Iterable[RepEntry], n: int = 8) -> list[RepEntry]:
    """f -> f^c for homogeneous entries; degree k becomes n - k.

    add is preserved under the complement, so expected add values carry
    over; expected dt values do not.
    """
    out = []
    for r in reps:
        if r.n != n:
            raise ValueError(f"{r.id}: expected n={n}, got {r.n}")
        if not r.anf.is_homogeneous():
            raise ValueError(f"{r.id}: needs a homogeneous ANF")
        c = complement(r.anf)
        out.append(RepEntry(f"{r.id}^c", n, format_anf(c), n - r.degree, r.expected_add, None))
    return out


def sweep_one(rep: RepEntry, k: int) -> SweepRow:
    start = time.perf_counter()
    a = rep.anf
    if rep.degree == k:
        add = exact_add_homogeneous(a, k, check=False)
    else:
        add = exact_add(a, k)
    dt = dt_from_add(add, a.n, k)
    return SweepRow(
        rep.id,
        a.n,
        k,
        len(a.monomials),
        dd_k(a, k),
        add,
        dt,
        time.perf_counter() - start,
        rep.expected_add,
        rep.expected_dt,
    )


def sweep(reps: Sequence[RepEntry], k: int, parallelism: int = 1) -> list[SweepRow]:
    """Exact add_k and dt_k per representative, sorted by dt_k (stable)."""
    ns = {r.n for r in reps}
    if len(ns) > 1:
        raise ValueError(f"representatives mix n values {sorted(ns)}")
    if parallelism > 1:
        with ThreadPoolExecutor(parallelism) as pool:
            rows = list(pool.map(lambda r: sweep_one(r, k), reps))
    else:
        rows = [sweep_one(r, k) for r in reps]
    return sorted(rows, key=lambda r: r.dt_k)


SWEEP_HEADER = ["id", "n", "k", "monomials", "dd_k", "add_k_rational", "add_k", "dt_k_rational", "dt_k"]


def _row_record(r: SweepRow, digits: int) -> dict:
    return {
        "id": r.id,
        "n": r.n,
        "k": r.k,
        "monomials": r.monomials,
        "dd_k": fmt_rational(r.dd_k),
        "add_k_rational": fmt_rational(r.add_k),
        "add_k": fmt(r.add_k, digits),
        "dt_k_rational": fmt_rational(r.dt_k),
        "dt_k": fmt(r.dt_k, digits),
    }


def sweep_csv(rows: Iterable[SweepRow], digits: int = 6) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, SWEEP_HEADER, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(_row_record(r, digits))
    return buf.getvalue()


def sweep_json(rows: Iterable[SweepRow], digits: int = 6) -> str:
    return json.dumps([_row_record(r, digits) for r in rows], indent=2) + "\n"


def read_sweep_csv(text: str) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(
            SweepRow(
                rec["id"],
                int(rec["n"]),
                int(rec["k"]),
                int(rec["monomials"]),
                Fraction(rec["dd_k"]),
                Fraction(rec["add_k_rational"]),
                Fraction(rec["dt_k_rational"]),
            )
        )
    return rows


def histogram(rows: Sequence[SweepRow], spec: HistogramSpec = HistogramSpec()) -> list[tuple]:
    """Histogram of dt_k values.

    ``distinct`` gives (value, count) per distinct exact rational in
    increasing order; ``bins`` gives (low, high, count) for equal-width
    bins, the last bin closed on the right.
    """
    if not rows:
        raise ValueError("histogram needs at least one row")
    values = [r.dt_k for r in rows]
    if spec.mode == "distinct":
        counts: dict[Fraction, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        return sorted(counts.items())
    lo, hi = spec.range if spec.range else (float(min(values)), float(max(values)))
    if hi < lo:
        raise ValueError("histogram range is inverted")
    nb = spec.bins if hi > lo else 1
    width = (hi - lo) / nb if hi > lo else 0.0
    counts_list = [0] * nb
    for v in values:
        x = float(v)
        if x < lo or x > hi:
            continue
        i = nb - 1 if width == 0 else min(int((x - lo) / width), nb - 1)
        counts_list[i] += 1
    return [(lo + i * width, lo + (i + 1) * width if i < nb - 1 else hi, c) for i, c in enumerate(counts_list)]


def histogram_csv(table: Sequence[tuple], mode: str, digits: int = 6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if mode == "distinct":
        w.writerow(["value", "count"])
        for v, c in table:
            w.writerow([fmt(v, digits), c])
    else:
        w.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in table:
            w.writerow([f"{lo:.{digits}f}", f"{hi:.{digits}f}", c])
    return buf.getvalue()
