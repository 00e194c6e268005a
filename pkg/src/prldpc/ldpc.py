"""Binary LDPC codes: parity-check structure, alist I/O, encoding.

Bit/symbol polarity used throughout the package: bit 0 maps to symbol +1,
bit 1 maps to symbol -1 (so BPSK symbols are ``1 - 2*bit``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


class AlistError(ValueError):
    """Malformed alist input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# parity-check structure


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix as dual adjacency lists.

    ``check_rows[j]`` lists the variable indices of check j and
    ``var_cols[i]`` lists the check indices of variable i, both sorted
    ascending and 0-based.  The two views must describe the same edge set.
    """

    n_vars: int
    n_checks: int
    check_rows: tuple[tuple[int, ...], ...]
    var_cols: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_vars <= 0 or self.n_checks < 0:
            raise ValueError("need n_vars >= 1 and n_checks >= 0")
        if len(self.check_rows) != self.n_checks or len(self.var_cols) != self.n_vars:
            raise ValueError("adjacency list lengths disagree with declared sizes")
        edges = set()
        for j, row in enumerate(self.check_rows):
            if list(row) != sorted(set(row)):
                raise ValueError(f"check {j}: unsorted or duplicate variable indices")
            for i in row:
                if not 0 <= i < self.n_vars:
                    raise ValueError(f"check {j}: variable index {i} out of range")
                edges.add((i, j))
        transposed = set()
        for i, col in enumerate(self.var_cols):
            if list(col) != sorted(set(col)):
                raise ValueError(f"variable {i}: unsorted or duplicate check indices")
            for j in col:
                if not 0 <= j < self.n_checks:
                    raise ValueError(f"variable {i}: check index {j} out of range")
                transposed.add((i, j))
        if edges != transposed:
            raise ValueError("check_rows and var_cols describe different edge sets")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, h: NDArray) -> "ParityCheckMatrix":
        h = np.asarray(h)
        m, n = h.shape
        rows = tuple(tuple(int(i) for i in np.nonzero(h[j])[0]) for j in range(m))
        cols = tuple(tuple(int(j) for j in np.nonzero(h[:, i])[0]) for i in range(n))
        return cls(n_vars=n, n_checks=m, check_rows=rows, var_cols=cols)

    @classmethod
    def from_rows(cls, n_vars: int, rows: list[list[int]]) -> "ParityCheckMatrix":
        rows_t = tuple(tuple(sorted(set(r))) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n_vars)]
        for j, row in enumerate(rows_t):
            for i in row:
                cols[i].append(j)
        return cls(n_vars=n_vars, n_checks=len(rows_t),
                   check_rows=rows_t, var_cols=tuple(tuple(c) for c in cols))

    # -- views -------------------------------------------------------------

    def to_dense(self) -> NDArray[np.uint8]:
        h = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        for j, row in enumerate(self.check_rows):
            h[j, list(row)] = 1
        return h

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.check_rows)

    @property
    def check_degrees(self) -> NDArray[np.int64]:
        return np.array([len(r) for r in self.check_rows], dtype=np.int64)

    @property
    def var_degrees(self) -> NDArray[np.int64]:
        return np.array([len(c) for c in self.var_cols], dtype=np.int64)


def syndrome(h: ParityCheckMatrix, bits: NDArray) -> NDArray[np.uint8]:
    """Parity of each check over GF(2); all-zero iff ``bits`` is a codeword."""
    bits = np.asarray(bits, dtype=np.uint8)
    out = np.empty(h.n_checks, dtype=np.uint8)
    for j, row in enumerate(h.check_rows):
        out[j] = np.bitwise_xor.reduce(bits[list(row)]) if row else 0
    return out


def to_bipolar(bits: NDArray) -> NDArray[np.float64]:
    """Map bits to channel symbols: 0 -> +1.0, 1 -> -1.0."""
    bits = np.asarray(bits)
    return 1.0 - 2.0 * bits.astype(np.float64)


def from_bipolar(symbols: NDArray) -> NDArray[np.uint8]:
    """Inverse symbol map; the sign boundary symbol >= 0 decodes to bit 0."""
    return (np.asarray(symbols, dtype=np.float64) < 0).astype(np.uint8)


# ---------------------------------------------------------------------------
# alist interchange format (MacKay archive dialect)


def parse_alist(text: str) -> ParityCheckMatrix:
    """Parse alist text: header, degree lists, then per-column and per-row
    1-based index lists.  Zero entries (padding for irregular codes) are
    ignored.  Raises :class:`AlistError` with a line number on bad input.
    """
    lines = text.splitlines()

    def ints(lineno: int, expect: int | None = None) -> list[int]:
        if lineno >= len(lines):
            raise AlistError(lineno + 1, "unexpected end of file")
        try:
            vals = [int(tok) for tok in lines[lineno].split()]
        except ValueError:
            raise AlistError(lineno + 1, "non-integer token") from None
        if expect is not None and len(vals) != expect:
            raise AlistError(lineno + 1, f"expected {expect} integers, got {len(vals)}")
        return vals

    header = ints(0)
    if len(header) != 2:
        raise AlistError(1, "header must be 'n_vars n_checks'")
    n, m = header
    if n <= 0 or m < 0:
        raise AlistError(1, f"bad dimensions ({n}, {m})")
    ints(1, 2)  # declared max degrees; recomputed below
    col_deg = ints(2, n)
    row_deg = ints(3, m)

    cols: list[list[int]] = []
    for i in range(n):
        vals = [v for v in ints(4 + i) if v != 0]
        for v in vals:
            if not 1 <= v <= m:
                raise AlistError(5 + i, f"check index {v} out of range 1..{m}")
        if len(vals) != col_deg[i]:
            raise AlistError(5 + i,
                             f"column {i + 1} lists {len(vals)} checks, "
                             f"degree line says {col_deg[i]}")
        cols.append([v - 1 for v in vals])

    rows: list[list[int]] = []
    for j in range(m):
        vals = [v for v in ints(4 + n + j) if v != 0]
        for v in vals:
            if not 1 <= v <= n:
                raise AlistError(5 + n + j, f"variable index {v} out of range 1..{n}")
        if len(vals) != row_deg[j]:
            raise AlistError(5 + n + j,
                             f"row {j + 1} lists {len(vals)} variables, "
                             f"degree line says {row_deg[j]}")
        rows.append([v - 1 for v in vals])

    h = ParityCheckMatrix(
        n_vars=n, n_checks=m,
        check_rows=tuple(tuple(sorted(r)) for r in rows),
        var_cols=tuple(tuple(sorted(c)) for c in cols),
    )
    return h


def serialize_alist(h: ParityCheckMatrix) -> str:
    """Render to canonical alist text (1-based, zero-padded to max degree)."""
    col_deg = h.var_degrees
    row_deg = h.check_degrees
    cmax = int(col_deg.max()) if h.n_vars else 0
    rmax = int(row_deg.max()) if h.n_checks else 0
    out = [f"{h.n_vars} {h.n_checks}", f"{cmax} {rmax}",
           " ".join(str(int(d)) for d in col_deg),
           " ".join(str(int(d)) for d in row_deg)]
    for col in h.var_cols:
        padded = [j + 1 for j in col] + [0] * (cmax - len(col))
        out.append(" ".join(str(v) for v in padded))
    for row in h.check_rows:
        padded = [i + 1 for i in row] + [0] * (rmax - len(row))
        out.append(" ".join(str(v) for v in padded))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# GF(2) linear algebra (bit-packed rows)


def _pack_rows(dense: NDArray[np.uint8]) -> NDArray[np.uint64]:
    m, n = dense.shape
    words = (n + 63) // 64
    packed = np.zeros((m, words), dtype=np.uint64)
    cols = np.arange(n)
    word_idx = cols // 64
    bit_idx = (cols % 64).astype(np.uint64)
    for w in range(words):
        sel = word_idx == w
        weights = (np.uint64(1) << bit_idx[sel]).astype(np.uint64)
        packed[:, w] = (dense[:, sel].astype(np.uint64) * weights).sum(axis=1)
    return packed


def _gf2_eliminate(packed: NDArray[np.uint64], n_cols: int) -> tuple[NDArray[np.uint64], list[int]]:
    """In-place reduced row echelon form; returns (matrix, pivot columns).

    Pivots are taken at the lowest available column index.
    """
    mat = packed
    m = mat.shape[0]
    pivot_cols: list[int] = []
    r = 0
    for col in range(n_cols):
        if r >= m:
            break
        w, b = divmod(col, 64)
        bit = np.uint64(1) << np.uint64(b)
        has = (mat[r:, w] & bit) != 0
        hits = np.nonzero(has)[0]
        if hits.size == 0:
            continue
        src = r + int(hits[0])
        if src != r:
            mat[[r, src]] = mat[[src, r]]
        others = np.nonzero((mat[:, w] & bit) != 0)[0]
        others = others[others != r]
        if others.size:
            mat[others] ^= mat[r]
        pivot_cols.append(col)
        r += 1
    return mat, pivot_cols


def gf2_rank(h: ParityCheckMatrix | NDArray) -> int:
    """Rank of a binary matrix over GF(2)."""
    dense = h.to_dense() if isinstance(h, ParityCheckMatrix) else np.asarray(h, dtype=np.uint8)
    _, pivots = _gf2_eliminate(_pack_rows(dense), dense.shape[1])
    return len(pivots)


# ---------------------------------------------------------------------------
# systematic encoder


@dataclass(frozen=True)
class GeneratorSpec:
    """Dense GF(2) generator matrix with its systematic column layout.

    ``col_perm[:message_len]`` are the message (free) columns and the rest
    are parity (pivot) columns: for every message m, the codeword x returned
    by :func:`encode` satisfies ``x[col_perm[:message_len]] == m``.
    """

    message_len: int
    col_perm: NDArray[np.int64] = field(repr=False)
    rows: NDArray[np.uint8] = field(repr=False)

    @property
    def n_vars(self) -> int:
        return self.rows.shape[1]


def derive_generator(h: ParityCheckMatrix) -> GeneratorSpec:
    """Generator for the null space of H via GF(2) Gaussian elimination.

    K = n_vars - rank(H); the generator row for message bit k places a 1 on
    the k-th free column and the parity pattern read off the reduced row
    echelon form on the pivot columns.
    """
    dense = h.to_dense()
    mat, pivots = _gf2_eliminate(_pack_rows(dense), h.n_vars)
    pivot_set = set(pivots)
    free_cols = [c for c in range(h.n_vars) if c not in pivot_set]
    k = len(free_cols)

    rows = np.zeros((k, h.n_vars), dtype=np.uint8)
    for idx, f in enumerate(free_cols):
        rows[idx, f] = 1
        w, b = divmod(f, 64)
        bit = np.uint64(1) << np.uint64(b)
        for r, p in enumerate(pivots):
            if mat[r, w] & bit:
                rows[idx, p] = 1

    perm = np.array(free_cols + pivots, dtype=np.int64)
    return GeneratorSpec(message_len=k, col_perm=perm, rows=rows)


def encode(gen: GeneratorSpec, message: NDArray) -> NDArray[np.uint8]:
    """Encode a message (length K) to a codeword (length N) over GF(2)."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (gen.message_len,):
        raise ValueError(f"message must have shape ({gen.message_len},)")
    active = gen.rows[message.astype(bool)]
    if active.shape[0] == 0:
        return np.zeros(gen.n_vars, dtype=np.uint8)
    return np.bitwise_xor.reduce(active, axis=0)


def code_info(h: ParityCheckMatrix) -> dict:
    """Summary dictionary: sizes, rank, rate, degree histograms, regularity."""
    rank = gf2_rank(h)
    k = h.n_vars - rank
    vdeg = h.var_degrees
    cdeg = h.check_degrees
    vhist = {int(d): int(c) for d, c in zip(*np.unique(vdeg, return_counts=True))}
    chist = {int(d): int(c) for d, c in zip(*np.unique(cdeg, return_counts=True))}
    return {
        "n_vars": h.n_vars,
        "n_checks": h.n_checks,
        "n_edges": h.n_edges,
        "rank": rank,
        "message_len": k,
        "rate": k / h.n_vars,
        "var_degree_hist": vhist,
        "check_degree_hist": chist,
        "regular": len(vhist) == 1 and len(chist) == 1,
    }
