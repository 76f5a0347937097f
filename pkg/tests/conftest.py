import itertools

import numpy as np
import pytest

from degprobe.boolfun import Anf
from degprobe.gf2 import popcount

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def random_anf(n, rng, deg, p=0.5, homogeneous=False):
    """Random ANF of degree exactly ``deg`` (lower terms unless homogeneous)."""
    top = [m for m in range(1 << n) if popcount(m) == deg]
    low = [] if homogeneous else [m for m in range(1 << n) if popcount(m) < deg]
    mons = {m for m in top + low if rng.random() < p}
    if not any(popcount(m) == deg for m in mons):
        mons.add(top[rng.integers(len(top))])
    return Anf(n, frozenset(mons))


def random_table(n, rng):
    return rng.integers(0, 2, size=1 << n, dtype=np.uint8)


def all_tables(n):
    for word in range(1 << (1 << n)):
        yield np.array([(word >> x) & 1 for x in range(1 << n)], dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _status(ok):
    return "SKIP" if ok is None else "PASS" if ok else "FAIL"


@pytest.fixture
def criterion():
    """Record an acceptance line (ok=None means skipped); the terminal summary lists them all."""

    def record(name, ok, detail=""):
        _ACCEPTANCE.append((name, ok, detail))
        print(f"{_status(ok)} {name} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{_status(ok)}  {name}  {detail}")
