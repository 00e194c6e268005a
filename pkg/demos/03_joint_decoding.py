"""
Joint detection and decoding on one factor graph
================================================

The main act.  Instead of alternating a trellis detector with a code
decoder, the joint decoder puts pairwise memory factors directly on the
Tanner graph and floods all messages at once.  This script watches one
noisy block get cleaned up iteration by iteration, then races the three
decoders over a few hundred blocks.
"""

import time

import numpy as np

from prldpc import (
    NoiseSpec,
    PrTarget,
    Trellis,
    TurboSchedule,
    build_graph,
    compute_couplings,
    decode,
    derive_generator,
    encode,
    fixture,
    substream,
    to_bipolar,
    transmit,
    turbo_equalize,
)

np.set_printoptions(precision=2, suppress=True)

h = fixture("ldpc-495-433")
gen = derive_generator(h)
target = PrTarget.parse("1-D")
noise = NoiseSpec.from_snr_db(target, 9.0)

# ---------------------------------------------------------------------------
# One block, end to end.

rng = substream(2024, "demo-joint")
msg = rng.integers(0, 2, size=gen.message_len).astype(np.uint8)
bits = encode(gen, msg)
y = transmit(to_bipolar(bits), target, noise, rng)

cpl = compute_couplings(y, target, noise, convention="paper")
edges = build_graph(h, target, cpl)
print(f"graph: {h.n_vars} variables, {h.n_checks} checks, "
      f"{edges.a.size} pairwise memory factors")

res = decode(h, target, cpl, max_iter=20, keep_trace=True)
print(f"converged={res.converged} after {res.iterations_used} iterations, "
      f"bit errors {int(np.sum(res.hard_bits != bits))}")

# the field trace shows how fast beliefs harden: count of bits whose
# posterior field still sits inside (-1, +1)
for it, lam in enumerate(res.lambda_trace, start=1):
    soft = int(np.sum(np.abs(lam) < 1.0))
    errs = int(np.sum((lam < 0).astype(np.uint8) != bits))
    print(f"  iter {it:2d}: {soft:3d} undecided fields, {errs:3d} "
          f"would-be bit errors")
    if errs == 0 and soft == 0:
        break

# ---------------------------------------------------------------------------
# The same block through the turbo equalizer: a 2-state trellis pass
# feeding extrinsic fields to a few plain decoding sweeps, repeated.

trellis = Trellis.from_target(target)
tres = turbo_equalize(h, trellis, y, noise, TurboSchedule.parse("3x6"))
print(f"\nturbo 3x6: converged={tres.converged}, "
      f"{tres.detector_passes} detector passes, "
      f"{tres.iterations_used} elementary passes, "
      f"bit errors {int(np.sum(tres.hard_bits != bits))}")

# ---------------------------------------------------------------------------
# A short race at one SNR.  (The BER demo does this properly, with stop
# rules and confidence intervals; here we just count failures.)

N_BLOCKS = 200
SNR_DB = 9.0
noise = NoiseSpec.from_snr_db(target, SNR_DB)


def run_many(decode_one):
    t0 = time.perf_counter()
    word_errs = bit_errs = 0
    for trial in range(N_BLOCKS):
        g = substream(7, "demo-race", trial)
        m = g.integers(0, 2, size=gen.message_len).astype(np.uint8)
        b = encode(gen, m)
        yy = transmit(to_bipolar(b), target, noise, g)
        hard = decode_one(yy)
        ne = int(np.sum(hard != b))
        bit_errs += ne
        word_errs += ne > 0
    dt = time.perf_counter() - t0
    return word_errs, bit_errs, dt


def joint_one(yy):
    c = compute_couplings(yy, target, noise, convention="paper")
    return decode(h, target, c, max_iter=20).hard_bits


def turbo_one(yy):
    return turbo_equalize(h, trellis, yy, noise,
                          TurboSchedule.parse("3x6")).hard_bits


def detector_only(yy):
    # trellis posteriors, no code: hard-slice the single BCJR pass
    from prldpc import bcjr
    post, _ = bcjr(trellis, yy, np.zeros(h.n_vars), noise)
    return (post < 0).astype(np.uint8)


print(f"\n{N_BLOCKS} blocks at {SNR_DB} dB (channel SNR, no rate penalty):")
for name, fn in (("joint message passing", joint_one),
                 ("turbo 3x6", turbo_one),
                 ("detector only", detector_only)):
    we, be, dt = run_many(fn)
    print(f"  {name:22s} word errors {we:3d}/{N_BLOCKS}   "
          f"bit errors {be:5d}   {1e3 * dt / N_BLOCKS:6.1f} ms/block")
