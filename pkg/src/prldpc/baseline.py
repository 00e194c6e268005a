"""Reference decoders: flooding sum-product, exact log-domain BCJR, and
turbo equalization (BCJR detector + inner sum-product passes).

All soft values are half-log-likelihood fields (log(P(+1)/P(-1)) = 2*field),
matching the joint decoder's convention, and bit polarity is 0 <-> +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from .channel import NoiseSpec, PrTarget
from .ldpc import ParityCheckMatrix
from .numerics import capped_tanh, leave_one_out_products, safe_atanh
from .prbp import DecodeResult, hard_decide


# ---------------------------------------------------------------------------
# memoryless flooding sum-product


class SumProductDecoder:
    """Flooding sum-product decoder reusable across blocks of one code."""

    def __init__(self, h: ParityCheckMatrix):
        self.h = h
        m = h.n_checks
        cdeg = h.check_degrees
        c = max(int(cdeg.max()) if m else 0, 1)
        self.chk_vars = np.zeros((m, c), dtype=np.int64)
        self.chk_mask = np.zeros((m, c), dtype=bool)
        slot_of = {}
        for j, row in enumerate(h.check_rows):
            for k, i in enumerate(row):
                self.chk_vars[j, k] = i
                self.chk_mask[j, k] = True
                slot_of[(i, j)] = k
        n = h.n_vars
        v = max(int(h.var_degrees.max()) if n else 0, 1)
        self.var_edge_row = np.zeros((n, v), dtype=np.int64)
        self.var_edge_col = np.zeros((n, v), dtype=np.int64)
        self.var_mask = np.zeros((n, v), dtype=bool)
        for i, col in enumerate(h.var_cols):
            for k, j in enumerate(col):
                self.var_edge_row[i, k] = j
                self.var_edge_col[i, k] = slot_of[(i, j)]
                self.var_mask[i, k] = True

    def syndrome(self, bits: NDArray[np.uint8]) -> NDArray[np.uint8]:
        if self.h.n_checks == 0:
            return np.zeros(0, dtype=np.uint8)
        padded = np.where(self.chk_mask, bits[self.chk_vars], 0).astype(np.uint8)
        return np.bitwise_xor.reduce(padded, axis=1)

    def run(
        self,
        llr_in: NDArray,
        max_iter: int,
        stop_on_syndrome: bool = True,
        keep_trace: bool = False,
    ) -> DecodeResult:
        u = np.asarray(llr_in, dtype=np.float64)
        if u.shape != (self.h.n_vars,):
            raise ValueError(f"llr_in must have shape ({self.h.n_vars},)")
        eta = np.where(self.chk_mask, u[self.chk_vars], 0.0)
        trace: list[NDArray[np.float64]] | None = [] if keep_trace else None
        lam = u.copy()
        hard = hard_decide(lam)
        used = 0
        for it in range(max_iter):
            t = np.where(self.chk_mask, capped_tanh(eta), 1.0)
            mu = np.where(self.chk_mask, safe_atanh(leave_one_out_products(t)), 0.0)
            gathered = np.where(self.var_mask,
                                mu[self.var_edge_row, self.var_edge_col], 0.0)
            mu_sum = gathered.sum(axis=1)
            base = u + mu_sum
            eta = np.where(self.chk_mask, base[self.chk_vars] - mu, 0.0)
            lam = base
            hard = hard_decide(lam)
            used = it + 1
            if trace is not None:
                trace.append(lam.copy())
            if stop_on_syndrome and not self.syndrome(hard).any():
                break
        converged = not self.syndrome(hard).any()
        return DecodeResult(hard_bits=hard, lambdas=lam, iterations_used=used,
                            converged=converged, lambda_trace=trace)


def sum_product_decode(
    h: ParityCheckMatrix,
    llr_in: NDArray,
    max_iter: int,
    **kwargs,
) -> DecodeResult:
    """Flooding sum-product decode of one block (memoryless channel model)."""
    return SumProductDecoder(h).run(llr_in, max_iter, **kwargs)


# ---------------------------------------------------------------------------
# trellis + BCJR


@dataclass(frozen=True)
class Trellis:
    """Channel state machine over the last L symbols.

    State index encodes bits of (x_{i-1}, ..., x_{i-L}), most recent in the
    lowest bit (bit 0 <-> symbol +1).  ``next_state[s, b]`` and
    ``output[s, b]`` describe the branch taken from s on input bit b.
    """

    memory: int
    n_states: int
    next_state: NDArray[np.int64]
    output: NDArray[np.float64]

    @classmethod
    def from_target(cls, target: PrTarget) -> "Trellis":
        mem = target.memory
        s_count = 1 << mem
        nxt = np.zeros((s_count, 2), dtype=np.int64)
        out = np.zeros((s_count, 2))
        h = target.coeffs
        for s in range(s_count):
            past = [1.0 - 2.0 * ((s >> (j - 1)) & 1) for j in range(1, mem + 1)]
            for b in (0, 1):
                x = 1.0 - 2.0 * b
                nxt[s, b] = ((s << 1) | b) & (s_count - 1)
                out[s, b] = h[0] * x + sum(h[j] * past[j - 1] for j in range(1, mem + 1))
        return cls(memory=mem, n_states=s_count, next_state=nxt, output=out)


def _state_of(symbols: NDArray[np.float64], mem: int) -> int:
    """State index for the last ``mem`` symbols, most recent first."""
    s = 0
    for j in range(1, mem + 1):
        bit = 0 if symbols[-j] > 0 else 1
        s |= bit << (j - 1)
    return s


def bcjr(
    trellis: Trellis,
    y: NDArray,
    priors: NDArray,
    noise: NoiseSpec,
    pad: float = 1.0,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Exact log-domain forward-backward detection on the channel trellis.

    ``y`` holds N+L observations of an N-symbol block padded with the known
    symbol on both sides; ``priors`` are per-bit fields for the N unknowns.
    Recursions use exact log-sum-exp (max-star) arithmetic; terminal states
    are pinned by the padding.  Returns (posterior, extrinsic) fields with
    extrinsic = posterior - prior.
    """
    y = np.asarray(y, dtype=np.float64)
    priors = np.asarray(priors, dtype=np.float64)
    mem = trellis.memory
    n = y.size - mem
    if priors.shape != (n,):
        raise ValueError(f"priors must have shape ({n},)")
    steps = n + mem
    s_count = trellis.n_states
    pad_bit = 0 if pad > 0 else 1
    init_state = _state_of(np.full(max(mem, 1), pad), mem)

    # branch log-metrics for every (step, state, input bit)
    inv2s2 = 1.0 / (2.0 * noise.sigma2)
    gamma = -((y[:, None, None] - trellis.output[None, :, :]) ** 2) * inv2s2
    sym = np.array([1.0, -1.0])
    gamma[:n] += priors[:, None, None] * sym[None, None, :]
    if mem:
        gamma[n:, :, 1 - pad_bit] = -np.inf  # tail inputs pinned to padding

    neg_inf = -np.inf
    alpha = np.full((steps + 1, s_count), neg_inf)
    alpha[0, init_state] = 0.0
    nxt = trellis.next_state
    for i in range(steps):
        nxt_alpha = np.full(s_count, neg_inf)
        cand = alpha[i][:, None] + gamma[i]
        np.logaddexp.at(nxt_alpha, nxt.ravel(), cand.ravel())
        alpha[i + 1] = nxt_alpha

    beta = np.full((steps + 1, s_count), neg_inf)
    beta[steps, init_state] = 0.0
    for i in range(steps - 1, -1, -1):
        cand = gamma[i] + beta[i + 1][nxt]
        beta[i] = np.logaddexp(cand[:, 0], cand[:, 1])

    # branch scores for the N data steps: [i, s, b] pairs alpha at the start
    # state, the branch metric, and beta at the branch's end state
    score = alpha[:n, :, None] + gamma[:n] + beta[1: n + 1][:, nxt]
    with np.errstate(invalid="ignore"):
        pos = logsumexp(score[:, :, 0], axis=1)
        neg = logsumexp(score[:, :, 1], axis=1)
    posterior = 0.5 * (pos - neg)
    extrinsic = posterior - priors
    return posterior, extrinsic


# ---------------------------------------------------------------------------
# turbo equalization


@dataclass(frozen=True)
class TurboSchedule:
    """T outer detector passes, each followed by S inner sum-product sweeps."""

    outer: int
    inner: int

    def __post_init__(self):
        if self.outer < 1 or self.inner < 0:
            raise ValueError("need outer >= 1 and inner >= 0")

    @classmethod
    def parse(cls, text: str) -> "TurboSchedule":
        parts = text.lower().split("x")
        if len(parts) != 2:
            raise ValueError(f"schedule must look like '3x6', got {text!r}")
        return cls(outer=int(parts[0]), inner=int(parts[1]))

    @property
    def budget(self) -> int:
        """Total elementary passes: outer * (inner + 1)."""
        return self.outer * (self.inner + 1)


def turbo_equalize(
    h: ParityCheckMatrix,
    trellis: Trellis,
    y: NDArray,
    noise: NoiseSpec,
    schedule: TurboSchedule,
    pad: float = 1.0,
    decoder: SumProductDecoder | None = None,
    stop_early: bool = True,
) -> DecodeResult:
    """Iterative detection/decoding with standard extrinsic wiring.

    Each outer round runs the BCJR detector with the code's extrinsic
    output as priors, hands the detector's extrinsic to the sum-product
    decoder for ``schedule.inner`` sweeps, and feeds the decoder's extrinsic
    back.  Stops early as soon as any inner sweep satisfies the syndrome
    (``stop_early=False`` forces the full schedule, e.g. for operation
    accounting).  ``iterations_used`` counts elementary passes (detector
    passes + inner sweeps consumed).
    """
    if decoder is None:
        decoder = SumProductDecoder(h)
    n = h.n_vars
    code_extrinsic = np.zeros(n)
    passes = 0
    det = 0
    result: DecodeResult | None = None
    for _ in range(schedule.outer):
        _, det_extrinsic = bcjr(trellis, y, code_extrinsic, noise, pad=pad)
        passes += 1
        det += 1
        if schedule.inner == 0:
            lam = det_extrinsic + code_extrinsic
            hard = hard_decide(lam)
            result = DecodeResult(hard_bits=hard, lambdas=lam,
                                  iterations_used=passes, detector_passes=det,
                                  converged=not decoder.syndrome(hard).any())
            code_extrinsic = np.zeros(n)
        else:
            inner = decoder.run(det_extrinsic, schedule.inner,
                                stop_on_syndrome=stop_early)
            passes += inner.iterations_used
            result = DecodeResult(hard_bits=inner.hard_bits, lambdas=inner.lambdas,
                                  iterations_used=passes, detector_passes=det,
                                  converged=inner.converged)
            code_extrinsic = inner.lambdas - det_extrinsic
        if stop_early and result.converged:
            break
    assert result is not None
    return result
