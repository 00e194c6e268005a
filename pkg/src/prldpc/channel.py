"""Discrete-time partial-response channel and its pairwise field expansion.

The channel convolves bipolar symbols with a short real target response
h = (h_0, ..., h_L), h_0 = 1, and adds white Gaussian noise:

    y_i = sum_j h_j x_{i-j} + noise,   i = 1 .. N+L,

where symbols outside the block (both ends, L on each side) are known
padding.  SNR is defined as s^2 = sum_j h_j^2 / sigma^2.

Because x_i^2 = 1, the block log-likelihood splits into per-symbol fields
and pairwise couplings:

    log P(y|x) = sum_i u_i x_i - sum_{p>=1} sum_i Q_p x_i x_{i+p} + const,
    u_i = c * sum_j h_j y_{i+j},      Q_p = c * sum_k h_k h_{k+p}.

The precision coefficient c follows the selected convention:
``exact`` uses the true Gaussian precision 1/sigma^2 while ``paper`` uses
the SNR s^2 = sum h^2 / sigma^2, i.e. paper-mode couplings are exact-mode
couplings scaled by sum_j h_j^2.  Pairwise terms whose partner lies in the
known padding are folded into u as additive boundary corrections.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .rng import standard_normal

CONVENTIONS = ("paper", "exact")


@dataclass(frozen=True)
class PrTarget:
    """Partial-response target polynomial h(D) = sum_j coeffs[j] D^j."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("target needs at least the D^0 tap")
        if self.coeffs[0] != 1.0:
            raise ValueError("target must be normalized with h_0 = 1")
        if len(self.coeffs) > 1 and self.coeffs[-1] == 0.0:
            raise ValueError("highest-order tap must be nonzero")

    @property
    def memory(self) -> int:
        """ISI length L (number of interfering past symbols)."""
        return len(self.coeffs) - 1

    @property
    def energy(self) -> float:
        """sum_j h_j^2."""
        return float(sum(c * c for c in self.coeffs))

    @property
    def pairwise_exact(self) -> bool:
        """True when the pairwise expansion is the full likelihood, i.e.
        h(D) = 1 - alpha*D^n with |alpha| <= 1 (single interfering tap)."""
        tail = [j for j in range(1, len(self.coeffs)) if self.coeffs[j] != 0.0]
        if not tail:
            return True
        return len(tail) == 1 and abs(self.coeffs[tail[0]]) <= 1.0

    @classmethod
    def parse(cls, text: str) -> "PrTarget":
        """Parse '1-D', '1+0.5D', '1-D^2' style polynomials, or a plain
        comma-separated tap list like '1,-1' / '1, 0, -1'."""
        text = text.strip()
        if "," in text:
            return cls(tuple(float(tok) for tok in text.split(",")))
        cleaned = text.replace(" ", "")
        term_re = re.compile(r"([+-]?[^+-]+)")
        coeff: dict[int, float] = {}
        pos = 0
        for m in term_re.finditer(cleaned):
            term = m.group(1)
            pos = m.end()
            dm = re.fullmatch(r"([+-]?)(\d*\.?\d*)(?:D(?:\^(\d+))?)?", term)
            if dm is None or (dm.group(2) == "" and "D" not in term):
                raise ValueError(f"cannot parse target term {term!r}")
            sign = -1.0 if dm.group(1) == "-" else 1.0
            mag = float(dm.group(2)) if dm.group(2) else 1.0
            power = 0
            if "D" in term:
                power = int(dm.group(3)) if dm.group(3) else 1
            coeff[power] = coeff.get(power, 0.0) + sign * mag
        if pos != len(cleaned):
            raise ValueError(f"trailing junk in target: {cleaned[pos:]!r}")
        degree = max(coeff)
        return cls(tuple(coeff.get(j, 0.0) for j in range(degree + 1)))


@dataclass(frozen=True)
class NoiseSpec:
    """AWGN level; ties linear SNR and noise variance for one target."""

    snr_linear: float
    sigma2: float

    def __post_init__(self):
        if not (self.snr_linear > 0 and self.sigma2 > 0):
            raise ValueError("snr_linear and sigma2 must be strictly positive")

    @classmethod
    def from_snr_db(cls, target: PrTarget, snr_db: float) -> "NoiseSpec":
        snr = 10.0 ** (snr_db / 10.0)
        return cls(snr_linear=snr, sigma2=target.energy / snr)


def snr_to_sigma2(target: PrTarget, snr_db: float) -> float:
    """Noise variance for a given SNR in dB: sigma^2 = sum h^2 / 10^(dB/10)."""
    return target.energy / 10.0 ** (snr_db / 10.0)


def apply_rate_penalty(snr_plot_db: float, rate: float, enabled: bool = True) -> float:
    """Map plot SNR to channel SNR, charging the code rate:
    snr_channel = snr_plot + 10 log10(rate).  Disabled -> identity."""
    if not enabled:
        return snr_plot_db
    if not 0 < rate <= 1:
        raise ValueError("rate must be in (0, 1]")
    return snr_plot_db + 10.0 * np.log10(rate)


def transmit(
    symbols: NDArray,
    target: PrTarget,
    noise: NoiseSpec | None,
    gen: np.random.Generator | None = None,
    pad: float = 1.0,
) -> NDArray[np.float64]:
    """Push a bipolar block through the channel; returns N+L observations.

    The block is padded with ``pad`` (known symbols) L deep on both sides,
    so every tap of every emitted sample is defined.  ``noise=None`` gives
    the noiseless output; otherwise Gaussian noise with the given sigma^2
    is added using Box-Muller samples from ``gen``.
    """
    x = np.asarray(symbols, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("symbols must be 1-D")
    if not np.all(np.abs(x) == 1.0):
        raise ValueError("symbols must be bipolar (+1/-1)")
    if abs(pad) != 1.0:
        raise ValueError("pad symbol must be +1 or -1")
    n = x.size
    mem = target.memory
    padded = np.concatenate([np.full(mem, pad), x, np.full(mem, pad)])
    h = np.asarray(target.coeffs)
    # y_i = sum_j h_j padded[i-j], for i covering the N+L samples that touch x
    y = np.zeros(n + mem)
    for j, hj in enumerate(h):
        y += hj * padded[mem - j: mem - j + n + mem]
    if noise is not None:
        if gen is None:
            raise ValueError("a random generator is required for noisy transmission")
        y = y + np.sqrt(noise.sigma2) * standard_normal(gen, n + mem)
    return y


@dataclass(frozen=True)
class ChannelCouplings:
    """Per-symbol fields and pairwise couplings of one received block.

    ``u`` already includes the boundary corrections (also reported
    separately in ``boundary``); ``q`` holds Q_p for p = 1..L.
    """

    u: NDArray[np.float64]
    q: tuple[float, ...]
    boundary: NDArray[np.float64]
    convention: str
    coefficient: float

    @property
    def n_vars(self) -> int:
        return self.u.size


def _precision_coefficient(noise: NoiseSpec, target: PrTarget, convention: str) -> float:
    if convention == "paper":
        return noise.snr_linear
    if convention == "exact":
        return 1.0 / noise.sigma2
    raise ValueError(f"unknown convention {convention!r}; pick from {CONVENTIONS}")


def compute_couplings(
    y: NDArray,
    target: PrTarget,
    noise: NoiseSpec,
    pad: float = 1.0,
    convention: str = "paper",
) -> ChannelCouplings:
    """Expand observations into fields u and couplings Q (see module doc).

    Boundary handling: every pairwise term -Q_p x_a x_b with exactly one
    endpoint in the known padding contributes -Q_p * pad to the in-block
    endpoint's field.
    """
    y = np.asarray(y, dtype=np.float64)
    mem = target.memory
    n = y.size - mem
    if n <= 0:
        raise ValueError("observation vector shorter than the channel memory")
    h = np.asarray(target.coeffs)
    c = _precision_coefficient(noise, target, convention)

    u = np.zeros(n)
    for j, hj in enumerate(h):
        u += c * hj * y[j: j + n]

    q = tuple(
        float(c * np.dot(h[: mem + 1 - p], h[p:])) for p in range(1, mem + 1)
    )

    boundary = np.zeros(n)
    for p, qp in enumerate(q, start=1):
        # prefix partners x_{b-p} with b-p < 0 are padding
        for b in range(min(p, n)):
            boundary[b] -= qp * pad
        # suffix partners x_{a+p} with a+p >= n are padding
        for a in range(max(n - p, 0), n):
            boundary[a] -= qp * pad
    return ChannelCouplings(
        u=u + boundary, q=q, boundary=boundary,
        convention=convention, coefficient=c,
    )


def log_likelihood(
    symbols: NDArray,
    y: NDArray,
    target: PrTarget,
    noise: NoiseSpec,
    pad: float = 1.0,
    convention: str = "paper",
) -> float:
    """Quadratic block score -c/2 * sum_i (y_i - sum_j h_j x_{i-j})^2.

    With ``exact`` convention this is the true Gaussian log-likelihood up
    to the x-independent normalization; ``paper`` scales by sum h^2.
    """
    x = np.asarray(symbols, dtype=np.float64)
    clean = transmit(x, target, noise=None, pad=pad)
    c = _precision_coefficient(noise, target, convention)
    resid = np.asarray(y, dtype=np.float64) - clean
    return float(-0.5 * c * np.dot(resid, resid))


def verify_expansion(
    y: NDArray,
    target: PrTarget,
    noise: NoiseSpec,
    pad: float = 1.0,
    convention: str = "exact",
    max_vars: int = 20,
) -> float:
    """Max deviation of the pairwise expansion from the quadratic score.

    Enumerates all 2^N symbol configurations, computes
    delta(x) = log_likelihood(x) - [sum u_i x_i - sum Q_p x_i x_{i+p}],
    and returns max_x |delta(x) - mean(delta)|; the mean estimates the
    x-independent constant.  Near machine epsilon when the expansion is
    algebraically faithful.
    """
    y = np.asarray(y, dtype=np.float64)
    mem = target.memory
    n = y.size - mem
    if n > max_vars:
        raise ValueError(f"enumeration guarded at {max_vars} symbols, got {n}")
    cpl = compute_couplings(y, target, noise, pad=pad, convention=convention)

    deltas = np.empty(2 ** n)
    for idx in range(2 ** n):
        bits = (idx >> np.arange(n)) & 1
        x = 1.0 - 2.0 * bits
        pairwise = 0.0
        for p, qp in enumerate(cpl.q, start=1):
            pairwise += qp * np.dot(x[:-p], x[p:]) if p < n else 0.0
        expansion = float(np.dot(cpl.u, x) - pairwise)
        deltas[idx] = log_likelihood(x, y, target, noise, pad=pad,
                                     convention=convention) - expansion
    return float(np.max(np.abs(deltas - deltas.mean())))
