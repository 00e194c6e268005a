"""Deterministic random streams for reproducible simulation.

The Monte Carlo harness must produce identical sample paths for a given
(master seed, snr index, trial index) regardless of execution order or
worker count, and the recipe must be simple enough to reproduce outside
this package.  Streams are therefore built on the Philox4x64 counter-based
generator, and Gaussian variates are produced by the Box-Muller transform
applied to that stream's uniforms -- never by ziggurat-style samplers
whose internals differ between libraries.

Exact recipe
------------
* stream key: Philox4x64 with ``key = (master_seed, mix(path))`` where
  ``mix`` folds the path coordinates with the 64-bit constant
  0x9E3779B97F4A7C15 (see :func:`substream`).  String coordinates are
  first reduced to integers by 64-bit FNV-1a over their UTF-8 bytes
  (offset 0xCBF29CE484222325, prime 0x100000001B3).
* uniforms: the generator's native 53-bit doubles in [0, 1).
* normals: draw uniforms u in pairs (u1, u2); with r = sqrt(-2 ln(1 - u1))
  (so the log argument lies in (0, 1]) return
  r*cos(2*pi*u2), r*sin(2*pi*u2) in that order.
"""

from __future__ import annotations

import numpy as np

_MIX_MULT = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _fnv1a(text: str) -> int:
    acc = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        acc = ((acc ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return acc


def _mix(path: tuple[int | str, ...]) -> np.uint64:
    acc = np.uint64(0)
    with np.errstate(over="ignore"):
        for part in path:
            if isinstance(part, str):
                part = _fnv1a(part)
            acc = (acc * _MIX_MULT + np.uint64(part & 0xFFFFFFFFFFFFFFFF)) & _MASK64
            acc ^= acc >> np.uint64(29)
    return acc


def substream(master_seed: int, *path: int | str) -> np.random.Generator:
    """Independent counter-based stream for a (seed, index...) coordinate.

    Parameters
    ----------
    master_seed : int
        Top-level experiment seed (64-bit).
    *path : int or str
        Any number of coordinates, e.g. (snr_index, trial).  Strings are
        hashed with 64-bit FNV-1a before folding.

    Returns
    -------
    numpy.random.Generator backed by Philox4x64.
    """
    key = np.array([np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF), _mix(path)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller on the generator's uniform doubles.

    Consumes exactly 2*ceil(n/2) uniforms in a fixed order so that
    independent implementations can replay the exact sample path.
    """
    if n <= 0:
        return np.zeros(0)
    half = (n + 1) // 2
    u = gen.random(2 * half)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = (2.0 * np.pi) * u[1::2]
    out = np.empty(2 * half)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n]
