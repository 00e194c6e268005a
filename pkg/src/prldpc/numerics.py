"""Shared numeric primitives for message-passing decoders.

All decoders in this package work with half-log-likelihood "fields":
a field eta represents a binary (+1/-1) soft value through tanh(eta),
so log(P(+1)/P(-1)) = 2*eta.  To keep atanh finite, every tanh output
is confined to (-1+EPS, 1-EPS); equivalently fields are capped at
+/- FIELD_CAP = atanh(1 - EPS).
"""

from __future__ import annotations

import numpy as np

EPS = 1e-12
TANH_CAP = 1.0 - EPS
FIELD_CAP = float(np.arctanh(TANH_CAP))


def clip_field(eta: np.ndarray | float) -> np.ndarray | float:
    """Cap field magnitudes so tanh(field) stays strictly inside (-1, 1)."""
    return np.clip(eta, -FIELD_CAP, FIELD_CAP)


def safe_atanh(t: np.ndarray | float) -> np.ndarray | float:
    """atanh with the argument clipped symmetrically into [-1+EPS, 1-EPS]."""
    return np.arctanh(np.clip(t, -TANH_CAP, TANH_CAP))


def capped_tanh(eta: np.ndarray | float) -> np.ndarray | float:
    """tanh with the argument capped at +/- FIELD_CAP.

    Fields themselves are stored uncapped (they are finite by construction:
    sums of atanh outputs, each at most FIELD_CAP, plus the channel field);
    only their tanh image is confined away from +/-1.
    """
    return np.tanh(np.clip(eta, -FIELD_CAP, FIELD_CAP))


def leave_one_out_products(values: np.ndarray) -> np.ndarray:
    """Per-row products excluding each entry, via prefix/suffix cumprods.

    ``values`` is a 2-D padded array; padding slots must hold 1.0 so they
    are multiplicatively neutral.  Division-free, so exact zeros propagate
    correctly.  Row-wise result[k] = prod(values[:k]) * prod(values[k+1:]).
    """
    m, c = values.shape
    if c == 1:
        return np.ones_like(values)
    pre = np.empty_like(values)
    pre[:, 0] = 1.0
    np.cumprod(values[:, :-1], axis=1, out=pre[:, 1:])
    suf = np.empty_like(values)
    suf[:, -1] = 1.0
    np.cumprod(values[:, :0:-1], axis=1, out=suf[:, -2::-1])
    return pre * suf
