"""Command-line surface: code inspection, single decodes, BER sweeps,
exactness audits, and complexity tables.

Every subcommand reads an optional JSON config file (``--config``) whose
keys mirror the flag names; flags override file values, and the merged
effective config is echoed into the output so any run can be reproduced
from its own artifact.  ``--show-config`` prints that merged config and
exits without running.  All stdout output is a single JSON document that
validates against ``schemas/output.schema.json`` shipped inside the
package; BER sweeps additionally write the CSV/sidecar pair described in
:mod:`prldpc.sim`.

Exit codes: 0 on success, 1 on usage errors (bad flags, malformed or
unknown config keys, missing required values), 2 on runtime failures
(unreadable codes, simulation errors).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import MISSING, asdict, fields as dataclass_fields
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .baseline import SumProductDecoder, Trellis, TurboSchedule, turbo_equalize
from .channel import NoiseSpec, PrTarget, compute_couplings, transmit
from .ldpc import code_info, derive_generator, encode, to_bipolar
from .oracle import oracle_check
from .prbp import decode as joint_decode
from .rng import substream
from .sim import SimConfig, load_code, predicted_ops, sweep


class UsageError(Exception):
    """Caller-side mistake: wrong flags, bad config file, missing values."""


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage problems; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _csv_strings(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


# Defaults are the single source of truth for each subcommand's key set;
# the ber command inherits the simulation defaults so they cannot drift.
_SIM_DEFAULTS = {
    f.name: (None if f.default is MISSING else
             list(f.default) if isinstance(f.default, tuple) else f.default)
    for f in dataclass_fields(SimConfig)
}

_DEFAULTS: dict[str, dict] = {
    "code-info": {"code": None},
    "decode": {
        "code": None,
        "target": "1-D",
        "snr_db": 4.0,
        "decoder": "prbp",
        "iterations": 20,
        "schedule": "3x6",
        "convention": "paper",
        "seed": 0,
        "pad": 1.0,
        "trace": False,
    },
    "ber": {**_SIM_DEFAULTS, "out": ".", "stem": "sweep", "workers": 0},
    "oracle-check": {
        "size": 12,
        "count": 50,
        "seed": 0,
        "targets": ["1-D", "1-D^2"],
    },
    "predict-ops": {
        "q": 3,
        "p": 6,
        "iterations": 20,
        "schedule": "3x6",
        "states": 2,
    },
}


def _merge_config(command: str, args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags, rejecting unknown keys."""
    cfg = dict(_DEFAULTS[command])
    path = getattr(args, "config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: "
                             f"{', '.join(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _require(cfg: dict, key: str) -> None:
    if cfg.get(key) is None:
        raise UsageError(f"{key!r} is required (flag or config file)")


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _emit(command: str, cfg: dict, result: dict) -> None:
    doc = {
        "command": command,
        "config": {k: _jsonable(v) for k, v in cfg.items()},
        "result": result,
    }
    schema = json.loads(
        resources.files("prldpc").joinpath("schemas/output.schema.json")
        .read_text())
    jsonschema.validate(doc, schema)
    json.dump(doc, sys.stdout, indent=2)
    print()


# ---------------------------------------------------------------------------
# subcommand bodies


def _run_code_info(cfg: dict) -> dict:
    _require(cfg, "code")
    h, sha = load_code(cfg["code"])
    info = code_info(h)
    info["var_degree_hist"] = {str(k): v for k, v in info["var_degree_hist"].items()}
    info["check_degree_hist"] = {str(k): v
                                 for k, v in info["check_degree_hist"].items()}
    return {"source": cfg["code"], "sha256": sha, **info}


def _run_decode(cfg: dict) -> dict:
    _require(cfg, "code")
    h, _ = load_code(cfg["code"])
    target = PrTarget.parse(cfg["target"])
    gen = derive_generator(h)
    noise = NoiseSpec.from_snr_db(target, float(cfg["snr_db"]))
    rng = substream(int(cfg["seed"]), "cli-decode")
    message = rng.integers(0, 2, size=gen.message_len).astype(np.uint8)
    code_bits = encode(gen, message)
    y = transmit(to_bipolar(code_bits), target, noise, rng, pad=cfg["pad"])

    decoder = cfg["decoder"]
    if decoder == "prbp":
        couplings = compute_couplings(y, target, noise, pad=cfg["pad"],
                                      convention=cfg["convention"])
        res = joint_decode(h, target, couplings, max_iter=cfg["iterations"],
                           keep_trace=bool(cfg["trace"]))
    elif decoder == "sumproduct":
        if target.memory != 0:
            raise ValueError("the sum-product reference runs on the "
                             "memoryless target only; use --target 1")
        couplings = compute_couplings(y, target, noise, pad=cfg["pad"],
                                      convention=cfg["convention"])
        res = SumProductDecoder(h).run(couplings.u, max_iter=cfg["iterations"],
                                       keep_trace=bool(cfg["trace"]))
    elif decoder == "turbo":
        res = turbo_equalize(h, Trellis.from_target(target), y, noise,
                             TurboSchedule.parse(cfg["schedule"]),
                             pad=cfg["pad"])
    else:
        raise ValueError(f"unknown decoder {decoder!r}")

    errors = int(np.sum(res.hard_bits != code_bits))
    out = {
        "snr_channel_db": float(cfg["snr_db"]),
        "sigma2": noise.sigma2,
        "message_len": gen.message_len,
        "rate": gen.message_len / h.n_vars,
        "converged": bool(res.converged),
        "iterations_used": int(res.iterations_used),
        "detector_passes": int(res.detector_passes),
        "bit_errors": errors,
        "word_error": errors > 0,
        "hard_bits": [int(b) for b in res.hard_bits],
        "lambdas": [float(v) for v in res.lambdas],
    }
    if res.lambda_trace is not None:
        out["lambda_trace"] = [[float(v) for v in lam]
                               for lam in res.lambda_trace]
    return out


def _run_ber(cfg: dict) -> dict:
    _require(cfg, "code")
    _require(cfg, "snr_db")
    sim_cfg = SimConfig(**{
        f.name: (tuple(cfg[f.name]) if f.name == "snr_db" else cfg[f.name])
        for f in dataclass_fields(SimConfig)
    })
    out_dir = Path(cfg["out"])
    csv_path = out_dir / f"{cfg['stem']}.csv"
    records = sweep(sim_cfg, csv_path, workers=int(cfg["workers"]))
    sidecar_path = csv_path.with_suffix(".json")
    sidecar = json.loads(sidecar_path.read_text())
    return {
        "csv": str(csv_path),
        "sidecar": str(sidecar_path),
        "rows": len(records),
        "config_sha256": sidecar["config_sha256"],
        "code_sha256": sidecar["code_sha256"],
        "records": [asdict(r) for r in records],
    }


def _run_oracle_check(cfg: dict) -> dict:
    if not 2 <= int(cfg["size"]) <= 16:
        raise UsageError("size must lie in [2, 16]; enumeration is 2^N")
    if int(cfg["count"]) < 0:
        raise UsageError("count must be nonnegative")
    return oracle_check(int(cfg["size"]), int(cfg["count"]),
                        int(cfg["seed"]), targets=tuple(cfg["targets"]))


def _run_predict_ops(cfg: dict) -> dict:
    q, p = int(cfg["q"]), int(cfg["p"])
    iters = int(cfg["iterations"])
    states = int(cfg["states"])
    sched = TurboSchedule.parse(cfg["schedule"])

    def row(decoder, counts, iterations=None, note=None):
        entry = {"decoder": decoder,
                 "multiplies_per_symbol": counts[0],
                 "adds_per_symbol": counts[1]}
        if iterations is not None:
            entry["iterations"] = iterations
        if note:
            entry["note"] = note
        return entry

    rows = [
        row("prbp", predicted_ops("prbp", q=q, p=p), 1,
            "one joint update of all fields"),
        row("prbp", predicted_ops("prbp", q=q, p=p, iterations=iters), iters,
            f"total across {iters} iterations"),
        row("sumproduct", predicted_ops("sumproduct", q=q, p=p), 1,
            "one decoding sweep, no channel memory"),
        row("bcjr", predicted_ops("bcjr", states=states), 1,
            f"{states}-state forward-backward pass, per symbol"),
        row("turbo", predicted_ops("turbo", q=q, p=p, outer=sched.outer,
                                   inner=sched.inner, states=states), None,
            f"{sched.outer} detector passes x {sched.inner} sweeps each"),
    ]
    return {"rows": rows}


_RUNNERS = {
    "code-info": _run_code_info,
    "decode": _run_decode,
    "ber": _run_ber,
    "oracle-check": _run_oracle_check,
    "predict-ops": _run_predict_ops,
}


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="prldpc",
                     description="Joint detection/decoding toolkit for LDPC "
                                 "codes over partial-response channels.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p: _Parser):
        p.add_argument("--config", metavar="FILE",
                       help="JSON file with config keys; flags override")
        p.add_argument("--show-config", action="store_true",
                       help="print the merged effective config and exit")

    p = sub.add_parser("code-info", help="inspect a code (fixture or alist)")
    common(p)
    p.add_argument("code", nargs="?", default=None,
                   help="fixture name or alist path")

    p = sub.add_parser("decode", help="run one end-to-end trial")
    common(p)
    p.add_argument("--code")
    p.add_argument("--target")
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--decoder", choices=("prbp", "turbo", "sumproduct"))
    p.add_argument("--iterations", type=int)
    p.add_argument("--schedule")
    p.add_argument("--convention", choices=("paper", "exact"))
    p.add_argument("--seed", type=int)
    p.add_argument("--pad", type=float, choices=(1.0, -1.0))
    p.add_argument("--trace", action=argparse.BooleanOptionalAction,
                   default=None, help="include the per-iteration field trace")

    p = sub.add_parser("ber", help="Monte Carlo BER sweep (CSV + sidecar)")
    common(p)
    p.add_argument("--code")
    p.add_argument("--snr-db", dest="snr_db", type=_csv_floats,
                   metavar="DB[,DB...]")
    p.add_argument("--decoder", choices=("prbp", "turbo", "sumproduct"))
    p.add_argument("--target")
    p.add_argument("--iterations", type=int)
    p.add_argument("--schedule")
    p.add_argument("--rate-penalty", dest="rate_penalty",
                   action=argparse.BooleanOptionalAction, default=None,
                   help="shift channel SNR by 10*log10(rate)")
    p.add_argument("--convention", choices=("paper", "exact"))
    p.add_argument("--seed", type=int)
    p.add_argument("--min-bit-errors", dest="min_bit_errors", type=int)
    p.add_argument("--max-codewords", dest="max_codewords", type=int)
    p.add_argument("--pad", type=float, choices=(1.0, -1.0))
    p.add_argument("--out", help="output directory")
    p.add_argument("--stem", help="basename for the CSV/sidecar pair")
    p.add_argument("--workers", type=int,
                   help="worker processes (0 = in-process)")

    p = sub.add_parser("oracle-check",
                       help="tree-exactness audit against enumeration")
    common(p)
    p.add_argument("--size", type=int, help="max variables per instance")
    p.add_argument("--count", type=int, help="number of random instances")
    p.add_argument("--seed", type=int)
    p.add_argument("--targets", type=_csv_strings, metavar="T[,T...]")

    p = sub.add_parser("predict-ops",
                       help="closed-form per-symbol operation counts")
    common(p)
    p.add_argument("--q", type=int, help="variable degree")
    p.add_argument("--p", type=int, help="check degree")
    p.add_argument("--iterations", type=int)
    p.add_argument("--schedule", help="turbo schedule, e.g. 3x6")
    p.add_argument("--states", type=int, help="trellis states")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args.command, args)
        if args.show_config:
            print(json.dumps({k: _jsonable(v) for k, v in cfg.items()},
                             indent=2))
            return 0
        result = _RUNNERS[args.command](cfg)
        _emit(args.command, cfg, result)
        return 0
    except UsageError as exc:
        print(f"prldpc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"prldpc {args.command}: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
