"""Seeded Monte Carlo BER/WER sweeps with arithmetic-operation accounting.

Reproducibility contract
------------------------
Trial ``t`` of grid point ``s`` draws every random quantity (message bits,
then noise) from ``substream(seed, s, t)``, so a record depends only on
(config, seed) -- never on batch size, worker count, or resume boundaries.
Trials are evaluated in batches of a fixed size and the stop rule is
applied scanning trial results in index order, which keeps the stopping
trial itself deterministic.

Operation accounting
--------------------
Counters follow a fixed ledger of multiply/add charges per symbol per
iteration; tanh/atanh/log/exp are treated as table lookups and the initial
per-symbol likelihoods are free.  For the joint decoder on a variable of
code degree q, ISI degree d, with neighbouring check degrees p:

* multiplies: each check field recomputes the q-1 incoming check products
  at (p-2) multiplies each, and each of the d ISI messages costs one
  multiply (computed once per symbol);
* adds: each of the q check fields spends max(q-2,0) combining check
  messages, max(d-1,0) combining ISI messages, plus one add onto the
  channel field and one subtracting the ISI total; ISI fields share one
  (q-1)-add combination of all check messages plus two adds each.

With d = 0 this reduces to the plain sum-product charge of q(q-1)(p-2)
multiplies and q(q-1) adds.  The trellis detector is charged as a
forward-normalized two-input recursion: 9 multiplies and 5S-1 adds per
symbol per pass at S states (18/9 for S = 2).
"""

from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .baseline import (SumProductDecoder, Trellis, TurboSchedule,
                       turbo_equalize)
from .channel import (CONVENTIONS, NoiseSpec, PrTarget, apply_rate_penalty,
                      compute_couplings, transmit)
from .fixtures import FIXTURES, fixture, fixture_path
from .ldpc import ParityCheckMatrix, derive_generator, encode, parse_alist, to_bipolar
from .prbp import IsiEdgeSet, JointDecoder, build_graph
from .rng import substream

DECODERS = ("prbp", "turbo", "sumproduct")

# Trials per scheduling quantum.  Part of the determinism contract only in
# that the stop rule is evaluated by scanning trial order, which makes the
# value irrelevant to the output -- it only shapes parallelism.
_BATCH = 128

_Z95 = 1.959963984540054


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        return (0.0, 1.0)
    phat = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    # the boundary cases are exact; don't let sqrt rounding leak past them
    lo = 0.0 if errors == 0 else max(0.0, (center - half) / denom)
    hi = 1.0 if errors == trials else min(1.0, (center + half) / denom)
    return (lo, hi)


# ---------------------------------------------------------------------------
# operation accounting


@dataclass(frozen=True)
class OpCounter:
    """Multiply/add totals for one decode run, plus its normalization.

    ``per_symbol_*`` quote the modal (bulk-symbol) charge for the whole
    run; totals include the cheaper boundary symbols.
    """

    multiplies: int
    adds: int
    symbols: int
    iterations: int
    per_symbol_multiplies: int
    per_symbol_adds: int

    def __post_init__(self):
        for f in ("multiplies", "adds", "symbols", "iterations",
                  "per_symbol_multiplies", "per_symbol_adds"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be nonnegative")

    @property
    def per_symbol_per_iteration(self) -> tuple[float, float]:
        it = max(self.iterations, 1)
        return (self.per_symbol_multiplies / it, self.per_symbol_adds / it)


def predicted_ops(decoder: str, q: int = 3, p: int = 6, iterations: int = 1,
                  outer: int = 3, inner: int = 6, states: int = 2) -> tuple[int, int]:
    """Closed-form per-symbol multiply/add counts.

    ``prbp``        : iterations * (q(q-1)(p-2) + 2, q(q+1) + 6)
    ``sumproduct``  : iterations * (q(q-1)(p-2), q(q-1))
    ``bcjr``        : iterations * (9*states, 5*states - 1)
    ``turbo``       : outer * (bcjr pass + inner sum-product sweeps)
    """
    if decoder == "prbp":
        return (iterations * (q * (q - 1) * (p - 2) + 2),
                iterations * (q * (q + 1) + 6))
    if decoder == "sumproduct":
        return (iterations * q * (q - 1) * (p - 2), iterations * q * (q - 1))
    if decoder == "bcjr":
        return (iterations * 9 * states, iterations * (5 * states - 1))
    if decoder == "turbo":
        bm, ba = predicted_ops("bcjr", states=states)
        sm, sa = predicted_ops("sumproduct", q=q, p=p)
        return (outer * (bm + inner * sm), outer * (ba + inner * sa))
    raise ValueError(f"unknown decoder {decoder!r}")


def _message_charges(h: ParityCheckMatrix,
                     isi_degrees: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol per-iteration (multiplies, adds) for the field update."""
    q = h.var_degrees.astype(np.int64)
    d = np.asarray(isi_degrees, dtype=np.int64)
    p_terms = np.maximum(h.check_degrees - 2, 0)
    t_sum = np.zeros(h.n_vars, np.int64)
    for row, t in zip(h.check_rows, p_terms):
        t_sum[list(row)] += t
    mults = (q - 1) * t_sum + d
    adds = (q * (np.maximum(q - 2, 0) + np.maximum(d - 1, 0)
                 + (q >= 2) + (d >= 1))
            + (d > 0) * np.maximum(q - 1, 0) + 2 * d)
    return mults, adds


def _modal(values: np.ndarray) -> int:
    vals, counts = np.unique(values, return_counts=True)
    return int(vals[np.argmax(counts)])


def _trellis_charges(n: int, states: int) -> tuple[np.ndarray, np.ndarray]:
    return (np.full(n, 9 * states, np.int64),
            np.full(n, 5 * states - 1, np.int64))


def measure_ops(decoder: str,
                h: ParityCheckMatrix,
                target: PrTarget | str = "1-D",
                iterations: int = 1,
                schedule: TurboSchedule | str = "3x6",
                snr_db: float = 4.0,
                convention: str = "paper",
                seed: int = 0,
                pad: float = 1.0) -> OpCounter:
    """Run an instrumented decode and tally its multiply/add charges.

    The decoder really runs (early stopping disabled) and every executed
    iteration is charged per the module-level accounting ledger, so the
    result reflects the work actually performed on this graph.
    """
    if isinstance(target, str):
        target = PrTarget.parse(target)
    if isinstance(schedule, str):
        schedule = TurboSchedule.parse(schedule)
    n = h.n_vars
    rng = substream(seed, "measure-ops", decoder)
    bits = (rng.random(n) < 0.5).astype(np.uint8)
    noise = NoiseSpec.from_snr_db(target, snr_db)
    y = transmit(to_bipolar(bits), target, noise, gen=rng, pad=pad)

    if decoder == "prbp":
        cpl = compute_couplings(y, target, noise, pad=pad, convention=convention)
        edges = build_graph(h, target, cpl)
        result = JointDecoder(h, edges).run(cpl, iterations, stop_on_syndrome=False)
        m, a = _message_charges(h, edges.var_degrees)
        it = result.iterations_used
        per_m, per_a = m * it, a * it
    elif decoder == "sumproduct":
        if target.memory != 0:
            raise ValueError("sum-product accounting assumes a memoryless target")
        cpl = compute_couplings(y, target, noise, pad=pad, convention=convention)
        result = SumProductDecoder(h).run(cpl.u.copy(), iterations,
                                          stop_on_syndrome=False)
        m, a = _message_charges(h, np.zeros(n, np.int64))
        it = result.iterations_used
        per_m, per_a = m * it, a * it
    elif decoder == "bcjr":
        trellis = Trellis.from_target(target)
        from .baseline import bcjr as _bcjr
        _bcjr(trellis, y, np.zeros(n), noise, pad=pad)
        m, a = _trellis_charges(n, trellis.n_states)
        it = iterations
        per_m, per_a = m * it, a * it
    elif decoder == "turbo":
        trellis = Trellis.from_target(target)
        result = turbo_equalize(h, trellis, y, noise, schedule, pad=pad,
                                stop_early=False)
        det = result.detector_passes
        sweeps = result.iterations_used - det
        bm, ba = _trellis_charges(n, trellis.n_states)
        sm, sa = _message_charges(h, np.zeros(n, np.int64))
        per_m = bm * det + sm * sweeps
        per_a = ba * det + sa * sweeps
        it = 1  # normalization: one full schedule
    else:
        raise ValueError(f"unknown decoder {decoder!r}")

    return OpCounter(multiplies=int(per_m.sum()), adds=int(per_a.sum()),
                     symbols=n, iterations=it,
                     per_symbol_multiplies=_modal(per_m),
                     per_symbol_adds=_modal(per_a))


# ---------------------------------------------------------------------------
# configuration and records


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a sweep's output, bit for bit."""

    code: str                       # fixture name or path to an alist file
    snr_db: tuple[float, ...]       # plot-axis grid, dB
    decoder: str = "prbp"
    target: str = "1-D"
    iterations: int = 20            # message-passing cap (prbp / sumproduct)
    schedule: str = "3x6"           # turbo: outer x inner
    rate_penalty: bool = True
    convention: str = "paper"
    seed: int = 0
    min_bit_errors: int = 100
    max_codewords: int = 10_000_000
    pad: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(v) for v in self.snr_db))
        if not self.snr_db:
            raise ValueError("snr grid must be nonempty")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        if self.min_bit_errors <= 0 or self.max_codewords <= 0:
            raise ValueError("stop rules must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        TurboSchedule.parse(self.schedule)
        PrTarget.parse(self.target)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        raw = json.loads(text)
        raw["snr_db"] = tuple(raw["snr_db"])
        return cls(**raw)

    def sha256(self) -> str:
        return hashlib.sha256(
            json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()


def load_code(code: str) -> tuple[ParityCheckMatrix, str]:
    """Resolve a fixture name or alist path to (matrix, sha256-of-alist)."""
    if code in FIXTURES:
        h = fixture(code)
        digest = hashlib.sha256(fixture_path(code).read_bytes()).hexdigest()
        return h, digest
    path = Path(code)
    if path.exists():
        data = path.read_bytes()
        return parse_alist(data.decode()), hashlib.sha256(data).hexdigest()
    raise FileNotFoundError(
        f"{code!r} is neither a known fixture {sorted(FIXTURES)} nor a file")


CSV_COLUMNS = ("snr_plot_db", "snr_channel_db", "codewords", "bits",
               "bit_errors", "word_errors", "ber", "wer", "ci_lo", "ci_hi",
               "mean_iters", "mults_per_sym", "adds_per_sym")

_INT_COLUMNS = {"codewords", "bits", "bit_errors", "word_errors"}


@dataclass(frozen=True)
class BerRecord:
    snr_plot_db: float
    snr_channel_db: float
    codewords: int
    bits: int
    bit_errors: int
    word_errors: int
    ber: float
    wer: float
    ci_lo: float
    ci_hi: float
    mean_iters: float
    mults_per_sym: float
    adds_per_sym: float

    def __post_init__(self):
        # tolerances accommodate the %.10g round-trip through CSV
        if self.bits and not math.isclose(self.ber, self.bit_errors / self.bits,
                                          rel_tol=1e-8, abs_tol=1e-15):
            raise ValueError("ber must equal bit_errors / bits")
        tol = 1e-8 * max(abs(self.ci_lo), abs(self.ci_hi), abs(self.ber)) + 1e-15
        if not (self.ci_lo - tol <= self.ber <= self.ci_hi + tol):
            raise ValueError("CI must contain the point estimate")
        if min(self.mults_per_sym, self.adds_per_sym) < 0:
            raise ValueError("op counters must be nonnegative")

    def csv_row(self) -> str:
        cells = []
        for col in CSV_COLUMNS:
            v = getattr(self, col)
            cells.append(str(int(v)) if col in _INT_COLUMNS else f"{v:.10g}")
        return ",".join(cells)

    @classmethod
    def from_csv_row(cls, row: dict[str, str]) -> "BerRecord":
        kwargs = {col: (int(row[col]) if col in _INT_COLUMNS else float(row[col]))
                  for col in CSV_COLUMNS}
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# the Monte Carlo loop


class _PointRunner:
    """Per-grid-point decode state shared by all trials of that point."""

    def __init__(self, config: SimConfig, snr_plot_db: float):
        self.config = config
        self.h, self.code_sha = load_code(config.code)
        self.gen = derive_generator(self.h)
        self.target = PrTarget.parse(config.target)
        self.rate = self.gen.message_len / self.h.n_vars
        self.snr_plot_db = float(snr_plot_db)
        self.snr_channel_db = apply_rate_penalty(self.snr_plot_db, self.rate,
                                                 config.rate_penalty)
        self.noise = NoiseSpec.from_snr_db(self.target, self.snr_channel_db)
        try:
            self.snr_idx = config.snr_db.index(self.snr_plot_db)
        except ValueError:
            raise ValueError(
                f"{snr_plot_db} dB is not on the configured grid") from None

        if config.decoder == "sumproduct" and self.target.memory != 0:
            raise ValueError("the sum-product reference runs on the "
                             "memoryless target; use target='1'")
        if config.decoder == "prbp":
            # graph topology and couplings Q depend on the noise level but
            # not on the data, so one decoder serves every trial
            probe = np.zeros(self.h.n_vars + self.target.memory)
            cpl = compute_couplings(probe, self.target, self.noise,
                                    pad=config.pad, convention=config.convention)
            self.edges = build_graph(self.h, self.target, cpl)
            self.joint = JointDecoder(self.h, self.edges)
            m, a = _message_charges(self.h, self.edges.var_degrees)
            self.charge = (_modal(m), _modal(a))
        elif config.decoder == "sumproduct":
            self.sp = SumProductDecoder(self.h)
            m, a = _message_charges(self.h, np.zeros(self.h.n_vars, np.int64))
            self.charge = (_modal(m), _modal(a))
        else:
            self.trellis = Trellis.from_target(self.target)
            self.sp = SumProductDecoder(self.h)
            self.schedule = TurboSchedule.parse(config.schedule)
            sm, sa = _message_charges(self.h, np.zeros(self.h.n_vars, np.int64))
            bm, ba = _trellis_charges(1, self.trellis.n_states)
            self.charge = (_modal(sm), _modal(sa), int(bm[0]), int(ba[0]))

    def run_trial(self, trial: int) -> tuple[int, int, int, int]:
        """-> (bit errors, word error flag, elementary passes, detector passes)."""
        cfg = self.config
        rng = substream(cfg.seed, self.snr_idx, trial)
        msg = (rng.random(self.gen.message_len) < 0.5).astype(np.uint8)
        bits = encode(self.gen, msg)
        y = transmit(to_bipolar(bits), self.target, self.noise, gen=rng,
                     pad=cfg.pad)
        if cfg.decoder == "prbp":
            cpl = compute_couplings(y, self.target, self.noise, pad=cfg.pad,
                                    convention=cfg.convention)
            res = self.joint.run(cpl, cfg.iterations)
        elif cfg.decoder == "sumproduct":
            cpl = compute_couplings(y, self.target, self.noise, pad=cfg.pad,
                                    convention=cfg.convention)
            res = self.sp.run(cpl.u.copy(), cfg.iterations)
        else:
            res = turbo_equalize(self.h, self.trellis, y, self.noise,
                                 self.schedule, pad=cfg.pad, decoder=self.sp)
        nerr = int((res.hard_bits != bits).sum())
        return nerr, int(nerr > 0), res.iterations_used, res.detector_passes

    def trial_ops(self, passes: int, detector_passes: int) -> tuple[int, int]:
        if self.config.decoder == "turbo":
            sm, sa, bm, ba = self.charge
            sweeps = passes - detector_passes
            return (bm * detector_passes + sm * sweeps,
                    ba * detector_passes + sa * sweeps)
        m, a = self.charge
        return m * passes, a * passes


# module-level worker state so ProcessPoolExecutor tasks stay tiny
_WORKER_POINT: _PointRunner | None = None


def _worker_init(config_json: str, snr_plot_db: float) -> None:
    global _WORKER_POINT
    _WORKER_POINT = _PointRunner(SimConfig.from_json(config_json), snr_plot_db)


def _worker_batch(args: tuple[int, int]) -> list[tuple[int, int, int, int]]:
    start, count = args
    assert _WORKER_POINT is not None
    return [_WORKER_POINT.run_trial(t) for t in range(start, start + count)]


def run_point(config: SimConfig, snr_plot_db: float,
              workers: int = 0) -> BerRecord:
    """Monte Carlo a single grid point until the stop rule fires.

    Trials are consumed in index order; the point stops at the first trial
    where the cumulative bit-error count reaches ``min_bit_errors``, or at
    ``max_codewords`` trials.  Output is independent of ``workers``.
    """
    runner = _PointRunner(config, snr_plot_db)
    n = runner.h.n_vars

    codewords = bit_errors = word_errors = 0
    total_passes = total_m = total_a = 0

    pool = None
    if workers and workers > 1:
        pool = concurrent.futures.ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(config.to_json(), float(snr_plot_db)))
    try:
        start = 0
        done = False
        while not done:
            remaining = config.max_codewords - start
            if remaining <= 0:
                break
            if pool is not None:
                spans = []
                offset = start
                for _ in range(workers):
                    take = min(_BATCH, config.max_codewords - offset)
                    if take <= 0:
                        break
                    spans.append((offset, take))
                    offset += take
                batches = list(pool.map(_worker_batch, spans))
            else:
                take = min(_BATCH, remaining)
                spans = [(start, take)]
                batches = [[runner.run_trial(t)
                            for t in range(start, start + take)]]
            for span, batch in zip(spans, batches):
                for nerr, werr, passes, det in batch:
                    codewords += 1
                    bit_errors += nerr
                    word_errors += werr
                    total_passes += passes
                    om, oa = runner.trial_ops(passes, det)
                    total_m += om
                    total_a += oa
                    if (bit_errors >= config.min_bit_errors
                            or codewords >= config.max_codewords):
                        done = True
                        break
                if done:
                    break
            start = spans[-1][0] + spans[-1][1]
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)

    bits = codewords * n
    ci_lo, ci_hi = wilson_interval(bit_errors, bits)
    return BerRecord(
        snr_plot_db=runner.snr_plot_db,
        snr_channel_db=runner.snr_channel_db,
        codewords=codewords,
        bits=bits,
        bit_errors=bit_errors,
        word_errors=word_errors,
        ber=bit_errors / bits if bits else 0.0,
        wer=word_errors / codewords if codewords else 0.0,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        mean_iters=total_passes / codewords if codewords else 0.0,
        mults_per_sym=total_m / codewords if codewords else 0.0,
        adds_per_sym=total_a / codewords if codewords else 0.0,
    )


def _fmt_snr(v: float) -> str:
    return f"{float(v):.10g}"


def sweep(config: SimConfig, csv_path: str | Path,
          workers: int = 0) -> list[BerRecord]:
    """Run the whole grid, appending one CSV row per completed point.

    Already-present rows are kept and their grid points skipped, so an
    interrupted sweep resumes where it stopped.  A JSON sidecar next to the
    CSV records the config, its digest, and the code digest.
    """
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)

    existing: dict[str, BerRecord] = {}
    if csv_path.exists() and csv_path.stat().st_size:
        with csv_path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                existing[_fmt_snr(float(row["snr_plot_db"]))] = \
                    BerRecord.from_csv_row(row)

    _, code_sha = load_code(config.code)
    sidecar = {
        "config": json.loads(config.to_json()),
        "config_sha256": config.sha256(),
        "code_sha256": code_sha,
        "csv_columns": list(CSV_COLUMNS),
    }
    sidecar_path = csv_path.with_suffix(".json")
    if existing and sidecar_path.exists():
        prior = json.loads(sidecar_path.read_text())
        if prior.get("config_sha256") != sidecar["config_sha256"]:
            raise ValueError(
                f"{csv_path} holds rows from a different config "
                f"({prior.get('config_sha256')!r}); refusing to mix sweeps")
    sidecar_path.write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")

    records: list[BerRecord] = []
    fresh = not existing
    with csv_path.open("w" if fresh else "a", newline="") as fh:
        if fresh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            fh.flush()
        for snr in config.snr_db:
            key = _fmt_snr(snr)
            if key in existing:
                records.append(existing[key])
                continue
            rec = run_point(config, snr, workers=workers)
            fh.write(rec.csv_row() + "\n")
            fh.flush()
            records.append(rec)
    return records
