"""Joint detection-and-decoding by belief propagation on a tripartite graph.

The graph has variable nodes (code bits), parity-check nodes from H, and
pairwise coupling nodes that tie symbol pairs (i, i+p) whenever the channel
expansion produces a nonzero coupling Q_p (see :mod:`prldpc.channel`).

All updates follow a strict Jacobi (flooding) schedule.  Field conventions:
``eta`` values are variable-to-factor fields, messages are

    mu_{i<-beta}   = atanh( prod_{j in beta, j != i} tanh eta_{j->beta} )
    zeta_{i<-node} = atanh( tanh eta_{j->node} * tanh Q_node ),  j opposite i

and the new fields are

    eta_{i->alpha} = u_i + sum_{beta != alpha} mu_{i<-beta} - sum_nodes zeta
    eta_{i->node}  = u_i + sum_alpha mu_{i<-alpha} - sum_{other nodes} zeta.

The per-bit decision statistic is Lambda_i = u_i + sum_alpha mu_{i<-alpha};
``full_posterior=True`` switches to u_i + sum mu - sum zeta, which includes
the coupling-node messages as well.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .channel import ChannelCouplings, PrTarget
from .ldpc import ParityCheckMatrix
from .numerics import capped_tanh, leave_one_out_products, safe_atanh


@dataclass(frozen=True)
class IsiEdgeSet:
    """Pairwise coupling nodes: node k ties variables a[k] < b[k] with
    coupling strength ``coupling[k]``."""

    n_vars: int
    a: NDArray[np.int64]
    b: NDArray[np.int64]
    coupling: NDArray[np.float64]

    def __post_init__(self):
        a, b = np.asarray(self.a), np.asarray(self.b)
        if a.shape != b.shape or a.shape != np.asarray(self.coupling).shape:
            raise ValueError("a, b, coupling must have identical shapes")
        if a.size and not (np.all(a < b) and a.min() >= 0 and b.max() < self.n_vars):
            raise ValueError("need 0 <= a < b < n_vars for every node")
        if len({(int(x), int(y)) for x, y in zip(a, b)}) != a.size:
            raise ValueError("duplicate coupling node")

    @property
    def n_nodes(self) -> int:
        return self.a.size

    @property
    def var_degrees(self) -> NDArray[np.int64]:
        deg = np.zeros(self.n_vars, dtype=np.int64)
        np.add.at(deg, self.a, 1)
        np.add.at(deg, self.b, 1)
        return deg


def build_graph(
    h: ParityCheckMatrix,
    target: PrTarget,
    couplings: ChannelCouplings,
) -> IsiEdgeSet:
    """Coupling nodes for a block: one node per nonzero Q_p per position,
    joining (i, i+p) for i = 0 .. N-p-1."""
    if couplings.n_vars != h.n_vars:
        raise ValueError("couplings sized for a different block length")
    if len(couplings.q) != target.memory:
        raise ValueError("couplings and target disagree on channel memory")
    a_list, b_list, q_list = [], [], []
    n = h.n_vars
    for p, qp in enumerate(couplings.q, start=1):
        if qp == 0.0 or p >= n:
            continue
        idx = np.arange(n - p, dtype=np.int64)
        a_list.append(idx)
        b_list.append(idx + p)
        q_list.append(np.full(n - p, qp))
    if a_list:
        a = np.concatenate(a_list)
        b = np.concatenate(b_list)
        q = np.concatenate(q_list)
    else:
        a = np.zeros(0, dtype=np.int64)
        b = np.zeros(0, dtype=np.int64)
        q = np.zeros(0)
    return IsiEdgeSet(n_vars=n, a=a, b=b, coupling=q)


class _Layout:
    """Padded index arrays for vectorized flooding updates on (H, ISI)."""

    def __init__(self, h: ParityCheckMatrix, isi: IsiEdgeSet):
        if isi.n_vars != h.n_vars:
            raise ValueError("ISI edge set sized for a different code")
        self.h = h
        self.isi = isi
        n, m = h.n_vars, h.n_checks
        cdeg = h.check_degrees
        self.max_check_deg = int(cdeg.max()) if m else 0
        c = max(self.max_check_deg, 1)
        self.chk_vars = np.zeros((m, c), dtype=np.int64)
        self.chk_mask = np.zeros((m, c), dtype=bool)
        slot_of = {}
        for j, row in enumerate(h.check_rows):
            for k, i in enumerate(row):
                self.chk_vars[j, k] = i
                self.chk_mask[j, k] = True
                slot_of[(i, j)] = k
        vdeg = h.var_degrees
        v = max(int(vdeg.max()) if n else 0, 1)
        self.var_edge_row = np.zeros((n, v), dtype=np.int64)
        self.var_edge_col = np.zeros((n, v), dtype=np.int64)
        self.var_mask = np.zeros((n, v), dtype=bool)
        for i, col in enumerate(h.var_cols):
            for k, j in enumerate(col):
                self.var_edge_row[i, k] = j
                self.var_edge_col[i, k] = slot_of[(i, j)]
                self.var_mask[i, k] = True
        self.tanh_q = np.asarray(capped_tanh(isi.coupling))
        self.isi_degrees = isi.var_degrees

    def syndrome(self, bits: NDArray[np.uint8]) -> NDArray[np.uint8]:
        if self.h.n_checks == 0:
            return np.zeros(0, dtype=np.uint8)
        padded = np.where(self.chk_mask, bits[self.chk_vars], 0).astype(np.uint8)
        return np.bitwise_xor.reduce(padded, axis=1)


@dataclass
class FieldState:
    """All variable-to-factor fields plus the message caches that built them.

    ``mu`` is aligned with the check layout (entry [j, k] is the message from
    check j to its k-th member); ``zeta_a``/``zeta_b`` are the coupling-node
    messages arriving at endpoints a/b; ``mu_sum``/``zeta_sum`` are their
    per-variable totals.  At iteration 0 all caches are exactly zero and
    every field equals the channel field u.
    """

    layout: _Layout
    eta_chk: NDArray[np.float64]
    eta_a: NDArray[np.float64]
    eta_b: NDArray[np.float64]
    mu: NDArray[np.float64]
    zeta_a: NDArray[np.float64]
    zeta_b: NDArray[np.float64]
    mu_sum: NDArray[np.float64]
    zeta_sum: NDArray[np.float64]
    iteration: int = 0


def init_state(layout: _Layout, couplings: ChannelCouplings) -> FieldState:
    u = couplings.u
    m, c = layout.chk_vars.shape
    eta_chk = np.where(layout.chk_mask, u[layout.chk_vars], 0.0)
    k = layout.isi.n_nodes
    return FieldState(
        layout=layout,
        eta_chk=eta_chk,
        eta_a=u[layout.isi.a] if k else np.zeros(0),
        eta_b=u[layout.isi.b] if k else np.zeros(0),
        mu=np.zeros((m, c)),
        zeta_a=np.zeros(k),
        zeta_b=np.zeros(k),
        mu_sum=np.zeros(layout.h.n_vars),
        zeta_sum=np.zeros(layout.h.n_vars),
        iteration=0,
    )


def _messages_from(state: FieldState):
    """Fresh (mu, zeta_a, zeta_b, mu_sum, zeta_sum) from the state's fields."""
    lay = state.layout
    t = np.where(lay.chk_mask, capped_tanh(state.eta_chk), 1.0)
    mu = np.where(lay.chk_mask, safe_atanh(leave_one_out_products(t)), 0.0)
    # message into a uses the opposite endpoint's field (at b), and vice versa
    zeta_a = safe_atanh(capped_tanh(state.eta_b) * lay.tanh_q)
    zeta_b = safe_atanh(capped_tanh(state.eta_a) * lay.tanh_q)
    n = lay.h.n_vars
    if mu.size:
        gathered = np.where(lay.var_mask,
                            mu[lay.var_edge_row, lay.var_edge_col], 0.0)
        mu_sum = gathered.sum(axis=1)
    else:  # no checks at all: a bare coupling chain
        mu_sum = np.zeros(n)
    zeta_sum = (np.bincount(lay.isi.a, weights=zeta_a, minlength=n)
                + np.bincount(lay.isi.b, weights=zeta_b, minlength=n))
    return mu, zeta_a, zeta_b, mu_sum, zeta_sum


def update_fields(state: FieldState, couplings: ChannelCouplings) -> FieldState:
    """One Jacobi sweep: messages from the current fields, then new fields."""
    lay = state.layout
    u = couplings.u
    mu, zeta_a, zeta_b, mu_sum, zeta_sum = _messages_from(state)
    base = u + mu_sum - zeta_sum
    eta_chk = np.where(lay.chk_mask, base[lay.chk_vars] - mu, 0.0)
    eta_a = base[lay.isi.a] + zeta_a
    eta_b = base[lay.isi.b] + zeta_b
    return FieldState(
        layout=lay, eta_chk=eta_chk, eta_a=eta_a, eta_b=eta_b,
        mu=mu, zeta_a=zeta_a, zeta_b=zeta_b,
        mu_sum=mu_sum, zeta_sum=zeta_sum,
        iteration=state.iteration + 1,
    )


def likelihoods(state: FieldState, couplings: ChannelCouplings,
                full_posterior: bool = False) -> NDArray[np.float64]:
    """Per-bit decision fields from the state's message caches.

    Default: Lambda_i = u_i + sum over checks of mu.  With
    ``full_posterior`` the coupling-node messages are included too:
    u_i + sum mu - sum zeta.
    """
    lam = couplings.u + state.mu_sum
    if full_posterior:
        lam = lam - state.zeta_sum
    return lam


def check_message(state: FieldState, check: int, var: int) -> float:
    """Single check-to-variable message from the current fields (reference
    implementation of the product rule; the vectorized path must agree)."""
    lay = state.layout
    row = lay.h.check_rows[check]
    if var not in row:
        raise ValueError(f"variable {var} not in check {check}")
    prod = 1.0
    for k, j in enumerate(row):
        if j == var:
            continue
        prod *= capped_tanh(state.eta_chk[check, k])
    return float(safe_atanh(prod))


def isi_message(state: FieldState, node: int, receiver: int) -> float:
    """Single coupling-node message toward ``receiver``; reads the field of
    the node's *other* endpoint."""
    lay = state.layout
    a, b = int(lay.isi.a[node]), int(lay.isi.b[node])
    if receiver == a:
        other_field = state.eta_b[node]
    elif receiver == b:
        other_field = state.eta_a[node]
    else:
        raise ValueError(f"variable {receiver} is not an endpoint of node {node}")
    return float(safe_atanh(capped_tanh(other_field) * lay.tanh_q[node]))


@dataclass
class DecodeResult:
    """Outcome of a message-passing decode."""

    hard_bits: NDArray[np.uint8]
    lambdas: NDArray[np.float64]
    iterations_used: int
    converged: bool
    field_snapshot: FieldState | None = None
    lambda_trace: list[NDArray[np.float64]] | None = None
    # set by turbo equalization: how many of iterations_used were
    # detector (trellis) passes rather than sum-product sweeps
    detector_passes: int = 0


def hard_decide(lambdas: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Field >= 0 decodes to bit 0 (symbol +1)."""
    return (np.asarray(lambdas) < 0).astype(np.uint8)


class JointDecoder:
    """Reusable decoder bound to one (H, ISI edge set) pair."""

    def __init__(self, h: ParityCheckMatrix, isi_edges: IsiEdgeSet):
        self.h = h
        self.isi = isi_edges
        self.layout = _Layout(h, isi_edges)

    def run(
        self,
        couplings: ChannelCouplings,
        max_iter: int,
        stop_on_syndrome: bool = True,
        full_posterior: bool = False,
        keep_state: bool = False,
        keep_trace: bool = False,
    ) -> DecodeResult:
        if couplings.n_vars != self.h.n_vars:
            raise ValueError("couplings sized for a different block length")
        state = init_state(self.layout, couplings)
        trace: list[NDArray[np.float64]] | None = [] if keep_trace else None
        lam = likelihoods(state, couplings, full_posterior)
        hard = hard_decide(lam)
        used = 0
        for _ in range(max_iter):
            state = update_fields(state, couplings)
            used = state.iteration
            lam = likelihoods(state, couplings, full_posterior)
            hard = hard_decide(lam)
            if trace is not None:
                trace.append(lam.copy())
            if stop_on_syndrome and not self.layout.syndrome(hard).any():
                break
        converged = not self.layout.syndrome(hard).any()
        return DecodeResult(
            hard_bits=hard, lambdas=lam, iterations_used=used,
            converged=converged, field_snapshot=state if keep_state else None,
            lambda_trace=trace,
        )


def decode(
    h: ParityCheckMatrix,
    target: PrTarget,
    couplings: ChannelCouplings,
    max_iter: int,
    isi_edges: IsiEdgeSet | None = None,
    **kwargs,
) -> DecodeResult:
    """One-shot joint decode; builds the coupling graph from the target and
    couplings unless an explicit edge set is supplied."""
    if isi_edges is None:
        isi_edges = build_graph(h, target, couplings)
    return JointDecoder(h, isi_edges).run(couplings, max_iter, **kwargs)
