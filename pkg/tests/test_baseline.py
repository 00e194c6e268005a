import itertools

import numpy as np
import pytest

from prldpc.baseline import (
    SumProductDecoder,
    Trellis,
    TurboSchedule,
    bcjr,
    sum_product_decode,
    turbo_equalize,
)
from prldpc.channel import NoiseSpec, PrTarget, compute_couplings, transmit
from prldpc.ldpc import syndrome, to_bipolar
from prldpc.rng import substream

from conftest import random_codeword


DICODE = PrTarget.parse("1-D")
MILD = PrTarget.parse("1+0.5D")


class TestSumProduct:
    def test_corrects_single_error_on_hamming(self, hamming_h):
        cw = random_codeword(hamming_h, 0)
        llr = (1.0 - 2.0 * cw) * 4.0
        llr[3] = -llr[3] * 0.5  # one moderately confident wrong bit
        res = SumProductDecoder(hamming_h).run(llr, max_iter=10)
        assert res.converged
        assert np.array_equal(res.hard_bits, cw)

    def test_zero_llr_is_ambivalent(self, toy_h):
        res = SumProductDecoder(toy_h).run(np.zeros(3), max_iter=4,
                                           stop_on_syndrome=False)
        assert np.array_equal(res.lambdas, np.zeros(3))

    def test_wrapper_matches_class(self, hamming_h):
        llr = substream(5, "sp").standard_normal(7) * 2.0
        a = sum_product_decode(hamming_h, llr, max_iter=6,
                               stop_on_syndrome=False)
        b = SumProductDecoder(hamming_h).run(llr, max_iter=6,
                                             stop_on_syndrome=False)
        assert np.array_equal(a.lambdas, b.lambdas)

    def test_early_stop_counts_iterations(self, hamming_h):
        cw = random_codeword(hamming_h, 1)
        llr = (1.0 - 2.0 * cw) * 6.0
        res = SumProductDecoder(hamming_h).run(llr, max_iter=30)
        assert res.converged
        assert res.iterations_used <= 2


class TestTrellis:
    def test_dicode_transitions(self):
        tr = Trellis.from_target(DICODE)
        assert tr.n_states == 2
        # state 0 remembers symbol +1 (bit 0); input bit 0 keeps it
        assert tr.next_state[0, 0] == 0
        assert tr.next_state[0, 1] == 1
        # outputs are x_i - x_{i-1} in {0, +-2}
        outs = sorted(tr.output.ravel().tolist())
        assert outs == [-2.0, 0.0, 0.0, 2.0]

    def test_memory_two_state_count(self):
        assert Trellis.from_target(PrTarget.parse("1-D^2")).n_states == 4

    def test_memoryless_single_state(self):
        tr = Trellis.from_target(PrTarget.parse("1"))
        assert tr.n_states == 1
        assert sorted(tr.output.ravel().tolist()) == [-1.0, 1.0]


def _brute_posteriors(y, target, noise, priors, pad=1.0):
    """Enumerate all symbol blocks; exact bit posterior log-ratios."""
    n = y.size - target.memory
    log_p = np.full((n, 2), -np.inf)
    for bits in itertools.product((0, 1), repeat=n):
        x = 1.0 - 2.0 * np.array(bits, dtype=np.float64)
        clean = transmit(x, target, noise=None, pad=pad)
        ll = -np.sum((y - clean) ** 2) / (2.0 * noise.sigma2)
        ll += float(np.sum(np.where(np.array(bits) == 0, priors, -priors)))
        for i, b in enumerate(bits):
            log_p[i, b] = np.logaddexp(log_p[i, b], ll)
    return 0.5 * (log_p[:, 0] - log_p[:, 1])


class TestBcjr:
    @pytest.mark.parametrize("target", [DICODE, MILD])
    def test_matches_enumeration(self, target):
        n = 9
        spec = NoiseSpec.from_snr_db(target, 3.0)
        rng = substream(21, "bcjr", target.memory)
        x = 1.0 - 2.0 * rng.integers(0, 2, size=n).astype(np.float64)
        y = transmit(x, target, spec, rng)
        priors = rng.standard_normal(n) * 0.7
        posterior, _ = bcjr(Trellis.from_target(target), y, priors, spec)
        expect = _brute_posteriors(y, target, spec, priors)
        assert posterior == pytest.approx(expect, abs=1e-12)

    def test_extrinsic_is_posterior_minus_prior(self):
        spec = NoiseSpec.from_snr_db(DICODE, 4.0)
        rng = substream(22, "bcjr-ext")
        x = 1.0 - 2.0 * rng.integers(0, 2, size=12).astype(np.float64)
        y = transmit(x, DICODE, spec, rng)
        priors = rng.standard_normal(12)
        posterior, extrinsic = bcjr(Trellis.from_target(DICODE), y,
                                    priors, spec)
        assert extrinsic == pytest.approx(posterior - priors, abs=1e-12)

    def test_noiseless_recovers_block(self):
        spec = NoiseSpec.from_snr_db(DICODE, 30.0)
        x = 1.0 - 2.0 * substream(23, "clean").integers(0, 2, size=20).astype(
            np.float64)
        y = transmit(x, DICODE, spec, substream(23, "clean-noise"))
        posterior, _ = bcjr(Trellis.from_target(DICODE), y, np.zeros(20),
                            spec)
        assert np.array_equal(np.sign(posterior), x)


class TestTurboSchedule:
    def test_parse(self):
        s = TurboSchedule.parse("3x6")
        assert (s.outer, s.inner) == (3, 6)
        assert TurboSchedule.parse("16X5").outer == 16

    def test_parse_rejects_bad_text(self):
        for bad in ("", "3", "x6", "3x", "0x4", "3x-1"):
            with pytest.raises(ValueError):
                TurboSchedule.parse(bad)


class TestTurboEqualize:
    def test_decodes_at_high_snr(self, hamming_h):
        cw = random_codeword(hamming_h, 8)
        spec = NoiseSpec.from_snr_db(DICODE, 14.0)
        y = transmit(to_bipolar(cw), DICODE, spec, substream(8, "teq"))
        res = turbo_equalize(hamming_h, Trellis.from_target(DICODE), y, spec,
                             TurboSchedule.parse("3x6"))
        assert res.converged
        assert np.array_equal(res.hard_bits, cw)
        assert not syndrome(hamming_h, res.hard_bits).any()

    def test_full_schedule_pass_accounting(self, hamming_h):
        cw = random_codeword(hamming_h, 9)
        spec = NoiseSpec.from_snr_db(DICODE, 10.0)
        y = transmit(to_bipolar(cw), DICODE, spec, substream(9, "teq2"))
        sched = TurboSchedule.parse("4x5")
        res = turbo_equalize(hamming_h, Trellis.from_target(DICODE), y, spec,
                             sched, stop_early=False)
        # every outer round burns one detector pass plus `inner` sweeps
        assert res.detector_passes == 4
        assert res.iterations_used == 4 * (5 + 1)

    def test_early_stop_never_exceeds_budget(self, hamming_h):
        spec = NoiseSpec.from_snr_db(DICODE, 2.0)
        cw = random_codeword(hamming_h, 10)
        y = transmit(to_bipolar(cw), DICODE, spec, substream(10, "teq3"))
        sched = TurboSchedule.parse("3x6")
        res = turbo_equalize(hamming_h, Trellis.from_target(DICODE), y, spec,
                             sched)
        assert res.iterations_used <= 3 * (6 + 1)
        assert res.detector_passes <= 3
