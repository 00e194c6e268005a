"""Benchmark code construction and caching.

The simulations in this package run on four sparse codes identified by
name.  Each is synthesized deterministically from a frozen seed using a
configuration-model graph with swap repair, then cached as an alist file
so later runs (and other tools) can load the identical matrix:

* ``ldpc-495-433``   -- 495 bits, 62 checks, column weight 3, row weights
  24 (59 rows) and 23 (3 rows); rate 433/495 ~ 0.875.
* ``ldpc-4095-3358`` -- 4095 bits, 737 checks, column weight 4, row
  weights 22 (571 rows) and 23 (166 rows); rate ~ 0.820.
* ``ldpc-2640-1320`` -- (3,6)-regular rate-1/2 code, girth >= 6.
* ``ldpc-4000-2000`` -- (3,6)-regular rate-1/2 code, girth >= 6.

All four are required to have full row rank, so the design rate equals
the true rate.  Synthesis retries with a fresh substream until the rank
and (where required) girth conditions hold; the retry count is part of
the deterministic recipe, so every machine converges to the same matrix.

Set ``PRLDPC_FIXTURE_DIR`` to relocate the cache (default
``~/.cache/prldpc/fixtures``).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ldpc import ParityCheckMatrix, gf2_rank, parse_alist, serialize_alist
from .rng import substream

_MASTER_SEED = 411


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    n_vars: int
    n_checks: int
    var_degree: int
    # (row_weight, count) pairs, assigned to rows in listed order
    check_profile: tuple[tuple[int, int], ...]
    girth6: bool
    # GF(2) rank of H.  Equal to n_checks except for ldpc-4095-3358:
    # with every column weight even, the rows always sum to zero mod 2,
    # so one dependency is unavoidable and the true rank is 736.
    rank: int

    @property
    def message_len(self) -> int:
        return self.n_vars - self.rank

    @property
    def rate(self) -> float:
        return self.message_len / self.n_vars

    def check_degrees(self) -> np.ndarray:
        return np.repeat([w for w, _ in self.check_profile],
                         [c for _, c in self.check_profile])


FIXTURES: dict[str, FixtureSpec] = {
    s.name: s
    for s in (
        FixtureSpec("ldpc-495-433", 495, 62, 3, ((24, 59), (23, 3)), False, 62),
        FixtureSpec("ldpc-4095-3358", 4095, 737, 4, ((22, 571), (23, 166)),
                    False, 736),
        FixtureSpec("ldpc-2640-1320", 2640, 1320, 3, ((6, 1320),), True, 1320),
        FixtureSpec("ldpc-4000-2000", 4000, 2000, 3, ((6, 2000),), True, 2000),
    )
}


def fixture_dir() -> Path:
    env = os.environ.get("PRLDPC_FIXTURE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "prldpc" / "fixtures"


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    return fixture_dir() / f"{name}.alist"


def list_fixtures() -> list[str]:
    return sorted(FIXTURES)


def _rows_have_dup(rows: list[list[int]]) -> list[int]:
    return [c for c, row in enumerate(rows) if len(set(row)) != len(row)]


def _repair_duplicates(rows: list[list[int]], rng: np.random.Generator) -> bool:
    """Swap stubs between checks until no check touches a variable twice.

    Degree sequences on both sides are preserved by construction.  Returns
    False if the loop fails to clean up within its budget.
    """
    m = len(rows)
    for _ in range(50_000):
        bad = _rows_have_dup(rows)
        if not bad:
            return True
        c = bad[0]
        row = rows[c]
        seen: set[int] = set()
        pos = next(i for i, v in enumerate(row)
                   if v in seen or seen.add(v))  # first repeated slot
        v = row[pos]
        for _ in range(200):
            c2 = int(rng.integers(m))
            if c2 == c:
                continue
            j = int(rng.integers(len(rows[c2])))
            w = rows[c2][j]
            if w == v or w in row or v in rows[c2]:
                continue
            row[pos], rows[c2][j] = w, v
            break
        else:
            return False
    return False


def _overlap_offenders(rows: list[list[int]], n: int) -> list[tuple[int, int]]:
    """Pairs of checks sharing >= 2 variables (i.e. 4-cycles)."""
    from scipy import sparse

    m = len(rows)
    indptr = np.cumsum([0] + [len(r) for r in rows])
    indices = np.concatenate([np.asarray(r) for r in rows])
    a = sparse.csr_matrix((np.ones(indices.size, np.int32), indices, indptr),
                          shape=(m, n))
    g = (a @ a.T).tocoo()
    mask = (g.row < g.col) & (g.data >= 2)
    return list(zip(g.row[mask].tolist(), g.col[mask].tolist()))


def _repair_four_cycles(rows: list[list[int]], n: int,
                        rng: np.random.Generator) -> bool:
    m = len(rows)
    for _round in range(60):
        offenders = _overlap_offenders(rows, n)
        if not offenders:
            return True
        for c1, c2 in offenders:
            shared = sorted(set(rows[c1]) & set(rows[c2]))
            if len(shared) < 2:
                continue  # already fixed by an earlier swap this round
            v = shared[-1]
            pos = rows[c2].index(v)
            for _ in range(500):
                c3 = int(rng.integers(m))
                if c3 in (c1, c2):
                    continue
                j = int(rng.integers(len(rows[c3])))
                w = rows[c3][j]
                if w in rows[c2] or v in rows[c3]:
                    continue
                rows[c2][pos], rows[c3][j] = w, v
                break
    return not _overlap_offenders(rows, n)


def _synthesize(spec: FixtureSpec, attempt: int) -> ParityCheckMatrix | None:
    rng = substream(_MASTER_SEED, spec.name, attempt)
    var_deg = np.full(spec.n_vars, spec.var_degree)
    chk_deg = spec.check_degrees()
    if var_deg.sum() != chk_deg.sum():
        raise ValueError(f"{spec.name}: stub counts disagree "
                         f"({var_deg.sum()} vs {chk_deg.sum()})")
    stubs = np.repeat(np.arange(spec.n_vars), var_deg)
    rng.shuffle(stubs)
    rows = [r.tolist() for r in np.split(stubs, np.cumsum(chk_deg)[:-1])]

    if not _repair_duplicates(rows, rng):
        return None
    if spec.girth6 and not _repair_four_cycles(rows, spec.n_vars, rng):
        return None

    h = ParityCheckMatrix.from_rows(spec.n_vars, [sorted(r) for r in rows])
    if gf2_rank(h) != spec.rank:
        return None
    return h


def synthesize(name: str, max_attempts: int = 64) -> ParityCheckMatrix:
    """Build a fixture from scratch (no cache involvement)."""
    spec = FIXTURES[name]
    for attempt in range(max_attempts):
        h = _synthesize(spec, attempt)
        if h is not None:
            return h
    raise RuntimeError(f"could not synthesize {name} in {max_attempts} attempts")


def _validate(h: ParityCheckMatrix, spec: FixtureSpec) -> None:
    if h.n_vars != spec.n_vars or h.n_checks != spec.n_checks:
        raise ValueError(f"{spec.name}: wrong shape {h.n_checks}x{h.n_vars}")
    if not np.all(h.var_degrees == spec.var_degree):
        raise ValueError(f"{spec.name}: column weights off")
    want = np.sort(spec.check_degrees())
    got = np.sort(h.check_degrees)
    if not np.array_equal(want, got):
        raise ValueError(f"{spec.name}: row-weight profile off")
    if spec.girth6:
        rows = [list(r) for r in h.check_rows]
        if _overlap_offenders(rows, h.n_vars):
            raise ValueError(f"{spec.name}: 4-cycle present")
    if gf2_rank(h) != spec.rank:
        raise ValueError(f"{spec.name}: rank {gf2_rank(h)} != {spec.rank}")


def fixture(name: str) -> ParityCheckMatrix:
    """Load a benchmark code, synthesizing and caching it on first use."""
    spec = FIXTURES[name]
    path = fixture_path(name)
    if path.exists():
        h = parse_alist(path.read_text())
        _validate(h, spec)
        return h
    h = synthesize(name)
    _validate(h, spec)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".alist.tmp")
    tmp.write_text(serialize_alist(h))
    tmp.replace(path)
    return h


def fixture_sha256(name: str) -> str:
    """Digest of the cached alist bytes (materializes the cache if needed)."""
    path = fixture_path(name)
    if not path.exists():
        fixture(name)
    return hashlib.sha256(path.read_bytes()).hexdigest()
