"""Exact-inference oracles for validating the message-passing decoders.

Provides brute-force marginals/partition function for small instances,
belief reconstruction from converged fields, the variational free energy
those beliefs extremize, a fixed-point residual, and a generator of
loop-free (tree) instances on which belief propagation must be exact.

Belief tables index binary states as 0 <-> symbol +1, 1 <-> symbol -1.
A check's joint table is flat over 2^degree configurations with member k
of the (sorted) row on bit k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit, logsumexp, xlogy

from .channel import ChannelCouplings, NoiseSpec, PrTarget, compute_couplings, transmit
from .ldpc import ParityCheckMatrix
from .prbp import FieldState, IsiEdgeSet, build_graph, update_fields

ENUM_GUARD = 24


class ZeroSupportError(ValueError):
    """Every configuration violates parity (cannot happen for a true code)."""


def _score_chunk(
    bits: NDArray[np.uint8],
    h: ParityCheckMatrix,
    couplings: ChannelCouplings,
    isi: IsiEdgeSet,
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """(score, parity-valid) for a chunk of bit configurations."""
    x = 1.0 - 2.0 * bits.astype(np.float64)
    score = x @ couplings.u
    if isi.n_nodes:
        score -= (x[:, isi.a] * x[:, isi.b]) @ isi.coupling
    valid = np.ones(bits.shape[0], dtype=bool)
    for row in h.check_rows:
        if row:
            valid &= np.bitwise_xor.reduce(bits[:, list(row)], axis=1) == 0
    return score, valid


def _bit_chunks(n: int, chunk_pow: int = 16):
    total = 1 << n
    step = 1 << min(chunk_pow, n)
    cols = np.arange(n, dtype=np.uint64)
    for start in range(0, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.uint64)
        yield ((idx[:, None] >> cols[None, :]) & np.uint64(1)).astype(np.uint8)


def exact_marginals(
    h: ParityCheckMatrix,
    couplings: ChannelCouplings,
    isi_edges: IsiEdgeSet,
    max_vars: int = ENUM_GUARD,
) -> tuple[NDArray[np.float64], float]:
    """Exhaustive per-bit marginals P(x_i = +1) and log partition function.

    Enumerates all 2^N configurations (streamed in chunks, guarded at
    ``max_vars``) of the weight
    prod_checks delta(parity) * exp(sum u_i x_i - sum Q x_a x_b).
    """
    n = h.n_vars
    if n > max_vars:
        raise ValueError(f"enumeration guarded at {max_vars} variables, got {n}")
    run_max = -np.inf
    z_acc = 0.0
    plus_acc = np.zeros(n)
    for bits in _bit_chunks(n):
        score, valid = _score_chunk(bits, h, couplings, isi_edges)
        if not valid.any():
            continue
        score = score[valid]
        plus_mask = bits[valid] == 0
        cmax = float(score.max())
        new_max = max(run_max, cmax)
        scale = np.exp(run_max - new_max) if np.isfinite(run_max) else 0.0
        w = np.exp(score - new_max)
        z_acc = z_acc * scale + float(w.sum())
        plus_acc = plus_acc * scale + w @ plus_mask
        run_max = new_max
    if not np.isfinite(run_max) or z_acc == 0.0:
        raise ZeroSupportError("no configuration satisfies all checks")
    return plus_acc / z_acc, float(np.log(z_acc) + run_max)


@dataclass
class BeliefSet:
    """Node, check, and pair-node beliefs (normalized probability tables)."""

    var: NDArray[np.float64]          # (N, 2): [P(+1), P(-1)]
    checks: list[NDArray[np.float64]]  # flat tables of length 2^degree
    pairs: NDArray[np.float64]        # (K, 2, 2) over (state_a, state_b)


def exact_belief_set(
    h: ParityCheckMatrix,
    couplings: ChannelCouplings,
    isi_edges: IsiEdgeSet,
    max_vars: int = 20,
) -> BeliefSet:
    """True joint marginals of every node/check/pair by full enumeration."""
    n = h.n_vars
    if n > max_vars:
        raise ValueError(f"enumeration guarded at {max_vars} variables, got {n}")
    bits = np.concatenate(list(_bit_chunks(n)), axis=0)
    score, valid = _score_chunk(bits, h, couplings, isi_edges)
    if not valid.any():
        raise ZeroSupportError("no configuration satisfies all checks")
    bits = bits[valid]
    w = np.exp(score[valid] - score[valid].max())
    z = w.sum()

    var = np.empty((n, 2))
    var[:, 0] = (w @ (bits == 0)) / z
    var[:, 1] = 1.0 - var[:, 0]

    checks = []
    for row in h.check_rows:
        deg = len(row)
        cfg = np.zeros(bits.shape[0], dtype=np.int64)
        for k, i in enumerate(row):
            cfg |= bits[:, i].astype(np.int64) << k
        tab = np.bincount(cfg, weights=w, minlength=1 << deg)
        checks.append(tab / z)

    pairs = np.zeros((isi_edges.n_nodes, 2, 2))
    for k in range(isi_edges.n_nodes):
        sa = bits[:, isi_edges.a[k]].astype(np.int64)
        sb = bits[:, isi_edges.b[k]].astype(np.int64)
        tab = np.bincount(sa * 2 + sb, weights=w, minlength=4).reshape(2, 2)
        pairs[k] = tab / z
    return BeliefSet(var=var, checks=checks, pairs=pairs)


def beliefs_from_fields(state: FieldState, couplings: ChannelCouplings) -> BeliefSet:
    """Belief tables reconstructed from a (converged) field state.

    Check beliefs are proportional to delta(parity) * exp(sum eta_k x_k)
    over their members' incoming fields; pair beliefs to
    exp(-Q x_a x_b + eta_a x_a + eta_b x_b).  Node beliefs use the
    degree-corrected single-node rule: the log-field is
    (sum of all incident fields - u_i) / (total degree - 1), which at any
    fixed point equals the full posterior field u + sum mu - sum zeta (the
    latter is used directly for degree-1 variables, where the ratio is 0/0).
    """
    lay = state.layout
    h = lay.h
    isi = lay.isi
    n = h.n_vars
    u = couplings.u

    if state.eta_chk.size:
        eta_sum = np.where(lay.var_mask,
                           state.eta_chk[lay.var_edge_row, lay.var_edge_col],
                           0.0).sum(axis=1)
    else:  # no checks at all: a bare coupling chain
        eta_sum = np.zeros(n)
    eta_sum = eta_sum + np.bincount(isi.a, weights=state.eta_a, minlength=n)
    eta_sum = eta_sum + np.bincount(isi.b, weights=state.eta_b, minlength=n)
    degree = h.var_degrees + lay.isi_degrees
    full_post = u + state.mu_sum - state.zeta_sum
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (eta_sum - u) / (degree - 1)
    lam = np.where(degree == 1, full_post, ratio)
    var = np.empty((n, 2))
    var[:, 0] = expit(2.0 * lam)
    var[:, 1] = expit(-2.0 * lam)

    checks = []
    for j, row in enumerate(h.check_rows):
        deg = len(row)
        cfg = np.arange(1 << deg)
        spins = 1.0 - 2.0 * ((cfg[:, None] >> np.arange(deg)[None, :]) & 1)
        fields = state.eta_chk[j, :deg]
        logmass = spins @ fields
        parity_ok = (np.bitwise_count(cfg.astype(np.uint64)) & np.uint64(1)) == 0
        logmass = np.where(parity_ok, logmass, -np.inf)
        tab = np.exp(logmass - logsumexp(logmass))
        checks.append(tab)

    pairs = np.zeros((isi.n_nodes, 2, 2))
    spin = np.array([1.0, -1.0])
    for k in range(isi.n_nodes):
        logmass = (-isi.coupling[k] * np.outer(spin, spin)
                   + state.eta_a[k] * spin[:, None]
                   + state.eta_b[k] * spin[None, :])
        pairs[k] = np.exp(logmass - logsumexp(logmass))
    return BeliefSet(var=var, checks=checks, pairs=pairs)


def bethe_free_energy(
    beliefs: BeliefSet,
    couplings: ChannelCouplings,
    h: ParityCheckMatrix,
    isi_edges: IsiEdgeSet,
) -> float:
    """Region-based free energy F = U - H of a belief set.

    U is the average energy: the per-bit channel fields enter as unary
    evidence terms -sum_i u_i <x_i>, pair nodes contribute
    +Q <x_a x_b>, and any belief mass on a parity-violating configuration
    makes F = +inf.  H is the region entropy: check and pair-node entropies
    plus the single-node terms weighted by (1 - total degree).  On a tree,
    evaluating at the exact marginals gives F = -log Z.
    """
    m_i = beliefs.var[:, 0] - beliefs.var[:, 1]
    energy = -float(np.dot(couplings.u, m_i))
    for k in range(isi_edges.n_nodes):
        corr = (beliefs.pairs[k, 0, 0] + beliefs.pairs[k, 1, 1]
                - beliefs.pairs[k, 0, 1] - beliefs.pairs[k, 1, 0])
        energy += float(isi_edges.coupling[k]) * float(corr)
    for j, tab in enumerate(beliefs.checks):
        cfg = np.arange(tab.size, dtype=np.uint64)
        odd = (np.bitwise_count(cfg) & np.uint64(1)) == 1
        if np.any(tab[odd] > 0.0):
            return float("inf")

    entropy = 0.0
    for tab in beliefs.checks:
        entropy -= float(xlogy(tab, tab).sum())
    entropy -= float(xlogy(beliefs.pairs, beliefs.pairs).sum())
    degree = h.var_degrees + isi_edges.var_degrees
    node_terms = xlogy(beliefs.var, beliefs.var).sum(axis=1)
    entropy += float(np.dot(degree - 1, node_terms))
    return energy - entropy


def stationarity_check(state: FieldState, couplings: ChannelCouplings) -> float:
    """Max |field - update(field)| over every edge: 0 at an exact fixed point."""
    nxt = update_fields(state, couplings)
    res = 0.0
    if state.eta_chk.size:
        res = float(np.abs(np.where(state.layout.chk_mask,
                                    nxt.eta_chk - state.eta_chk, 0.0)).max())
    if state.eta_a.size:
        res = max(res, float(np.abs(nxt.eta_a - state.eta_a).max()),
                  float(np.abs(nxt.eta_b - state.eta_b).max()))
    return res


def consistency_residual(beliefs: BeliefSet, h: ParityCheckMatrix,
                         isi_edges: IsiEdgeSet) -> float:
    """Max mismatch between factor-belief marginals and node beliefs."""
    worst = 0.0
    for j, row in enumerate(h.check_rows):
        tab = beliefs.checks[j]
        cfg = np.arange(tab.size)
        for k, i in enumerate(row):
            sel = ((cfg >> k) & 1) == 0
            worst = max(worst, abs(float(tab[sel].sum()) - beliefs.var[i, 0]))
    for k in range(isi_edges.n_nodes):
        pa = beliefs.pairs[k].sum(axis=1)
        pb = beliefs.pairs[k].sum(axis=0)
        worst = max(worst, abs(pa[0] - beliefs.var[isi_edges.a[k], 0]),
                    abs(pb[0] - beliefs.var[isi_edges.b[k], 0]))
    return worst


# ---------------------------------------------------------------------------
# loop-free instances


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def random_tree_instance(
    gen: np.random.Generator,
    n_vars: int,
    target: PrTarget,
    convention: str | None = None,
    snr_db_range: tuple[float, float] = (-6.0, 2.0),
) -> tuple[ParityCheckMatrix, ChannelCouplings, IsiEdgeSet]:
    """Random instance whose combined check+coupling graph is a forest.

    Checks are grown as a tree (each new check touches one already-connected
    variable plus fresh leaves); the channel's coupling chain is then
    overlaid, keeping only pair nodes that close no cycle (union-find test).
    Couplings come from an actual noisy transmission of a random symbol
    block, so field magnitudes are realistic for the sampled SNR.
    """
    if n_vars < 2:
        raise ValueError("need at least two variables")
    perm = list(gen.permutation(n_vars))
    connected = [int(perm.pop())]
    rows: list[list[int]] = []
    max_checks = int(gen.integers(1, max(n_vars // 2, 2)))
    for _ in range(max_checks):
        if not perm:
            break
        anchor = int(connected[int(gen.integers(len(connected)))])
        k = int(gen.integers(1, min(3, len(perm)) + 1))
        fresh = [int(perm.pop()) for _ in range(k)]
        rows.append(sorted([anchor] + fresh))
        connected.extend(fresh)
    h = ParityCheckMatrix.from_rows(n_vars, rows)

    snr_db = float(gen.uniform(*snr_db_range))
    noise = NoiseSpec.from_snr_db(target, snr_db)
    bits = gen.integers(0, 2, size=n_vars)
    x = 1.0 - 2.0 * bits.astype(np.float64)
    y = transmit(x, target, noise, gen)
    mode = convention or ("paper", "exact")[int(gen.integers(2))]
    couplings = compute_couplings(y, target, noise, convention=mode)

    full = build_graph(h, target, couplings)
    uf = _UnionFind(n_vars + h.n_checks)
    for j, row in enumerate(h.check_rows):
        for i in row:
            uf.union(i, n_vars + j)
    keep = []
    for k in range(full.n_nodes):
        if uf.union(int(full.a[k]), int(full.b[k])):
            keep.append(k)
    keep_idx = np.array(keep, dtype=np.int64)
    isi = IsiEdgeSet(n_vars=n_vars,
                     a=full.a[keep_idx] if keep_idx.size else np.zeros(0, dtype=np.int64),
                     b=full.b[keep_idx] if keep_idx.size else np.zeros(0, dtype=np.int64),
                     coupling=full.coupling[keep_idx] if keep_idx.size else np.zeros(0))
    return h, couplings, isi


def run_to_fixed_point(
    h: ParityCheckMatrix,
    couplings: ChannelCouplings,
    isi_edges: IsiEdgeSet,
    max_iter: int = 300,
    tol: float = 0.0,
) -> FieldState:
    """Iterate flooding updates until the fields stop moving (or max_iter)."""
    from .prbp import JointDecoder, init_state

    layout = JointDecoder(h, isi_edges).layout
    state = init_state(layout, couplings)
    for _ in range(max_iter):
        nxt = update_fields(state, couplings)
        delta = 0.0
        if state.eta_chk.size:
            delta = float(np.abs(np.where(layout.chk_mask,
                                          nxt.eta_chk - state.eta_chk, 0.0)).max())
        if state.eta_a.size:
            delta = max(delta, float(np.abs(nxt.eta_a - state.eta_a).max()),
                        float(np.abs(nxt.eta_b - state.eta_b).max()))
        state = nxt
        if delta <= tol:
            break
    return state


def oracle_check(
    n_vars: int,
    count: int,
    seed: int,
    targets: tuple[str, ...] = ("1-D", "1-D^2"),
    min_vars: int = 4,
) -> dict:
    """Batch tree-exactness audit used by tests and the command line.

    For ``count`` random loop-free instances per the given targets, runs the
    joint decoder to its fixed point and reports worst-case deviations from
    exhaustive enumeration: marginal error, fixed-point residual, and the
    free-energy identity |F + log Z|.
    """
    from .channel import PrTarget

    gen = np.random.Generator(np.random.Philox(key=np.array([seed, 0xA5A5], dtype=np.uint64)))
    worst = {"marginal": 0.0, "stationarity": 0.0, "free_energy": 0.0}
    instances = 0
    for idx in range(count):
        target = PrTarget.parse(targets[idx % len(targets)])
        n = int(gen.integers(min_vars, n_vars + 1))
        h, couplings, isi = random_tree_instance(gen, n, target)
        state = run_to_fixed_point(h, couplings, isi)
        beliefs = beliefs_from_fields(state, couplings)
        p_plus, logz = exact_marginals(h, couplings, isi)
        worst["marginal"] = max(worst["marginal"],
                                float(np.abs(beliefs.var[:, 0] - p_plus).max()))
        worst["stationarity"] = max(worst["stationarity"],
                                    stationarity_check(state, couplings))
        f = bethe_free_energy(beliefs, couplings, h, isi)
        worst["free_energy"] = max(worst["free_energy"], abs(f + logz))
        instances += 1
    worst["instances"] = instances
    return worst
