"""Shared test fixtures: small codes and a cached benchmark matrix."""

from __future__ import annotations

import numpy as np
import pytest

from prldpc.ldpc import ParityCheckMatrix, derive_generator, encode
from prldpc.rng import substream


# Single parity check over three bits: the smallest code with any structure.
# Rate 2/3, one check, all variables degree 1.
@pytest.fixture
def toy_h() -> ParityCheckMatrix:
    return ParityCheckMatrix.from_rows(3, [[0, 1, 2]])


# (7,4) Hamming code: every nonzero syndrome points at a unique column, so
# single-error correction is exact and easy to assert against.
@pytest.fixture
def hamming_h() -> ParityCheckMatrix:
    rows = [[0, 1, 2, 4], [0, 1, 3, 5], [0, 2, 3, 6]]
    return ParityCheckMatrix.from_rows(7, rows)


@pytest.fixture(scope="session")
def margulis_h():
    from prldpc.fixtures import fixture

    return fixture("ldpc-2640-1320")


@pytest.fixture(scope="session")
def small_benchmark_h():
    from prldpc.fixtures import fixture

    return fixture("ldpc-495-433")


def random_codeword(h: ParityCheckMatrix, seed: int, *tags) -> np.ndarray:
    """Random encoded block, deterministic in (seed, tags)."""
    gen = derive_generator(h)
    rng = substream(seed, "test-codeword", *tags)
    msg = rng.integers(0, 2, size=gen.message_len).astype(np.uint8)
    return encode(gen, msg)
