import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prldpc.baseline import SumProductDecoder
from prldpc.channel import NoiseSpec, PrTarget, compute_couplings, transmit
from prldpc.ldpc import ParityCheckMatrix, syndrome, to_bipolar
from prldpc.prbp import (
    JointDecoder,
    build_graph,
    decode,
    hard_decide,
)
from prldpc.rng import substream

from conftest import random_codeword


DICODE = PrTarget.parse("1-D")
PR2 = PrTarget.parse("1-D^2")


def _noisy_couplings(h, target, snr_db, seed, convention="paper"):
    spec = NoiseSpec.from_snr_db(target, snr_db)
    bits = random_codeword(h, seed)
    y = transmit(to_bipolar(bits), target, spec, substream(seed, "prbp-noise"))
    return bits, compute_couplings(y, target, spec, convention=convention)


def test_hard_decide_convention():
    lam = np.array([3.0, -0.2, 0.0, -4.0])
    assert np.array_equal(hard_decide(lam), [0, 1, 0, 1])


class TestBuildGraph:
    def test_dicode_couples_adjacent_symbols(self, toy_h):
        spec = NoiseSpec.from_snr_db(DICODE, 4.0)
        y = transmit(np.ones(3), DICODE, spec, substream(0, "g"))
        cpl = compute_couplings(y, DICODE, spec)
        g = build_graph(toy_h, DICODE, cpl)
        assert g.n_nodes == 2
        assert np.array_equal(g.a, [0, 1])
        assert np.array_equal(g.b, [1, 2])

    def test_pr2_skips_the_zero_tapped_distance(self, toy_h):
        spec = NoiseSpec.from_snr_db(PR2, 4.0)
        y = transmit(np.ones(3), PR2, spec, substream(0, "g2"))
        cpl = compute_couplings(y, PR2, spec)
        g = build_graph(toy_h, PR2, cpl)
        # distance-1 coupling is exactly zero for 1-D^2, so only (0,2) remains
        assert g.n_nodes == 1
        assert (g.a[0], g.b[0]) == (0, 2)

    def test_memoryless_graph_is_empty(self, toy_h):
        t = PrTarget.parse("1")
        spec = NoiseSpec.from_snr_db(t, 4.0)
        y = transmit(np.ones(3), t, spec, substream(0, "g3"))
        g = build_graph(toy_h, t, compute_couplings(y, t, spec))
        assert g.n_nodes == 0


class TestDecode:
    def test_clean_channel_converges_to_truth(self, hamming_h):
        bits, cpl = _noisy_couplings(hamming_h, DICODE, 18.0, seed=1)
        res = decode(hamming_h, DICODE, cpl, max_iter=40)
        assert res.converged
        assert np.array_equal(res.hard_bits, bits)

    def test_syndrome_stop_halts_early(self, hamming_h):
        bits, cpl = _noisy_couplings(hamming_h, DICODE, 18.0, seed=2)
        res = decode(hamming_h, DICODE, cpl, max_iter=50)
        assert res.converged and res.iterations_used < 50
        forced = decode(hamming_h, DICODE, cpl, max_iter=50,
                        stop_on_syndrome=False)
        assert forced.iterations_used == 50
        assert np.array_equal(forced.hard_bits, res.hard_bits)

    def test_fields_stay_finite_at_extreme_snr(self, hamming_h):
        bits, cpl = _noisy_couplings(hamming_h, DICODE, 60.0, seed=3)
        res = decode(hamming_h, DICODE, cpl, max_iter=30,
                     stop_on_syndrome=False)
        assert np.all(np.isfinite(res.lambdas))

    def test_trace_records_every_iteration(self, hamming_h):
        _, cpl = _noisy_couplings(hamming_h, DICODE, 6.0, seed=4)
        res = decode(hamming_h, DICODE, cpl, max_iter=5,
                     stop_on_syndrome=False, keep_trace=True)
        assert len(res.lambda_trace) == 5
        assert np.array_equal(res.lambda_trace[-1], res.lambdas)

    def test_decoder_reuse_matches_one_shot(self, hamming_h):
        _, cpl = _noisy_couplings(hamming_h, DICODE, 5.0, seed=5)
        edges = build_graph(hamming_h, DICODE, cpl)
        dec = JointDecoder(hamming_h, edges)
        a = dec.run(cpl, max_iter=12, stop_on_syndrome=False)
        b = decode(hamming_h, DICODE, cpl, max_iter=12,
                   stop_on_syndrome=False)
        assert np.array_equal(a.lambdas, b.lambdas)

    def test_wrong_block_length_rejected(self, hamming_h, toy_h):
        _, cpl = _noisy_couplings(toy_h, DICODE, 5.0, seed=6)
        edges = build_graph(toy_h, DICODE, cpl)
        with pytest.raises(ValueError):
            JointDecoder(hamming_h,
                         build_graph(hamming_h, DICODE,
                                     _noisy_couplings(hamming_h, DICODE, 5.0,
                                                      seed=6)[1])).run(
                cpl, max_iter=3)


def test_memoryless_reduction_is_bit_exact(hamming_h):
    """With no channel memory the joint decoder IS the sum-product decoder:
    same flooding schedule, same fields, to the last ulp."""
    t = PrTarget.parse("1")
    spec = NoiseSpec.from_snr_db(t, 3.0)
    for trial in range(10):
        bits = random_codeword(hamming_h, trial, "l0")
        y = transmit(to_bipolar(bits), t, spec, substream(trial, "l0-noise"))
        cpl = compute_couplings(y, t, spec)
        joint = decode(hamming_h, t, cpl, max_iter=8, stop_on_syndrome=False,
                       keep_trace=True)
        sp = SumProductDecoder(hamming_h).run(cpl.u, max_iter=8,
                                              stop_on_syndrome=False,
                                              keep_trace=True)
        for lam_j, lam_s in zip(joint.lambda_trace, sp.lambda_trace):
            assert np.array_equal(lam_j, lam_s)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_negating_evidence_mirrors_the_posterior(seed):
    """Pure pairwise chain (no checks): u -> -u flips every field's sign."""
    h = ParityCheckMatrix.from_rows(6, [])
    spec = NoiseSpec.from_snr_db(DICODE, 4.0)
    x = 1.0 - 2.0 * substream(seed, "sym").integers(0, 2, size=6).astype(float)
    y = transmit(x, DICODE, spec, substream(seed, "sym-noise"))
    cpl = compute_couplings(y, DICODE, spec)
    flipped = type(cpl)(u=-cpl.u, q=cpl.q, boundary=-cpl.boundary,
                        convention=cpl.convention, coefficient=cpl.coefficient)
    res = decode(h, DICODE, cpl, max_iter=25, stop_on_syndrome=False)
    mirror = decode(h, DICODE, flipped, max_iter=25, stop_on_syndrome=False)
    assert res.lambdas == pytest.approx(-mirror.lambdas, abs=1e-12)


def test_variable_relabeling_equivariance(hamming_h):
    """Permuting variable labels permutes the answer and nothing else."""
    bits, cpl = _noisy_couplings(hamming_h, DICODE, 6.0, seed=11)
    res = decode(hamming_h, DICODE, cpl, max_iter=15, stop_on_syndrome=False)

    perm = substream(12, "perm").permutation(7)
    inv = np.argsort(perm)
    # relabel variables: check rows and the coupling graph move together
    rows_p = [sorted(int(perm[i]) for i in row) for row in hamming_h.check_rows]
    h_p = ParityCheckMatrix.from_rows(7, rows_p)
    edges = build_graph(hamming_h, DICODE, cpl)
    pa, pb = perm[edges.a], perm[edges.b]
    lo, hi = np.minimum(pa, pb), np.maximum(pa, pb)  # endpoints are unordered
    order = np.argsort(lo * 7 + hi)
    edges_p = type(edges)(n_vars=7, a=lo[order], b=hi[order],
                          coupling=edges.coupling[order])
    cpl_p = type(cpl)(u=cpl.u[inv], q=cpl.q, boundary=cpl.boundary[inv],
                      convention=cpl.convention, coefficient=cpl.coefficient)
    res_p = JointDecoder(h_p, edges_p).run(cpl_p, max_iter=15,
                                           stop_on_syndrome=False)
    assert res_p.lambdas[perm] == pytest.approx(res.lambdas, abs=1e-9)


def test_converged_flag_reflects_syndrome(hamming_h):
    bits, cpl = _noisy_couplings(hamming_h, DICODE, -2.0, seed=13)
    res = decode(hamming_h, DICODE, cpl, max_iter=3)
    assert res.converged == (not syndrome(hamming_h, res.hard_bits).any())
