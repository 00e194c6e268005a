"""Black-box tests of the command-line surface via main(argv)."""

import json
from importlib import resources

import jsonschema
import pytest

from prldpc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_doc(out):
    doc = json.loads(out)
    schema = json.loads(
        resources.files("prldpc").joinpath("schemas/output.schema.json")
        .read_text())
    jsonschema.validate(doc, schema)
    return doc


# ---------------------------------------------------------------------------
# code-info


def test_code_info_fixture(capsys):
    code, out, _ = run_cli(capsys, "code-info", "ldpc-495-433")
    assert code == 0
    doc = parse_doc(out)
    assert doc["command"] == "code-info"
    res = doc["result"]
    assert res["n_vars"] == 495
    assert res["n_checks"] == 62
    assert res["message_len"] == 433
    assert res["var_degree_hist"] == {"3": 495}
    assert len(res["sha256"]) == 64


def test_code_info_requires_code(capsys):
    code, _, err = run_cli(capsys, "code-info")
    assert code == 1
    assert "required" in err


def test_code_info_unreadable_code(capsys):
    code, _, err = run_cli(capsys, "code-info", "/no/such/file.alist")
    assert code == 2
    assert "error" in err or "failed" in err


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["code-info", "--frobnicate"])
    assert exc.value.code == 1


def test_missing_subcommand_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


# ---------------------------------------------------------------------------
# decode


def test_decode_joint(capsys):
    code, out, _ = run_cli(capsys, "decode", "--code", "ldpc-495-433",
                           "--snr-db", "10", "--seed", "3")
    assert code == 0
    doc = parse_doc(out)
    res = doc["result"]
    assert len(res["hard_bits"]) == 495
    assert len(res["lambdas"]) == 495
    assert set(res["hard_bits"]) <= {0, 1}
    assert res["word_error"] == (res["bit_errors"] > 0)
    assert res["iterations_used"] >= 1
    assert doc["config"]["seed"] == 3


def test_decode_is_reproducible(capsys):
    argv = ("decode", "--code", "ldpc-495-433", "--snr-db", "8",
            "--seed", "11")
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert first == second


def test_decode_trace_included_on_request(capsys):
    code, out, _ = run_cli(capsys, "decode", "--code", "ldpc-495-433",
                           "--snr-db", "10", "--trace")
    assert code == 0
    res = parse_doc(out)["result"]
    assert "lambda_trace" in res
    assert len(res["lambda_trace"]) == res["iterations_used"]
    assert all(len(row) == 495 for row in res["lambda_trace"])


def test_decode_sumproduct_needs_memoryless_target(capsys):
    code, _, err = run_cli(capsys, "decode", "--code", "ldpc-495-433",
                           "--decoder", "sumproduct")
    assert code == 2
    assert "memoryless" in err

    code, out, _ = run_cli(capsys, "decode", "--code", "ldpc-495-433",
                           "--decoder", "sumproduct", "--target", "1",
                           "--snr-db", "6")
    assert code == 0
    assert parse_doc(out)["result"]["detector_passes"] == 0


def test_decode_turbo(capsys):
    code, out, _ = run_cli(capsys, "decode", "--code", "ldpc-495-433",
                           "--decoder", "turbo", "--snr-db", "10",
                           "--schedule", "2x3")
    assert code == 0
    res = parse_doc(out)["result"]
    assert res["detector_passes"] >= 1
    assert res["iterations_used"] > res["detector_passes"]


# ---------------------------------------------------------------------------
# ber


def _ber_argv(tmp_path, *extra):
    return ("ber", "--code", "ldpc-495-433", "--snr-db", "10,12",
            "--iterations", "10", "--min-bit-errors", "1",
            "--max-codewords", "4", "--out", str(tmp_path),
            "--stem", "unit") + extra


def test_ber_writes_csv_and_sidecar(capsys, tmp_path):
    code, out, _ = run_cli(capsys, *_ber_argv(tmp_path))
    assert code == 0
    doc = parse_doc(out)
    res = doc["result"]
    assert res["rows"] == 2
    assert len(res["records"]) == 2
    assert (tmp_path / "unit.csv").exists()
    assert (tmp_path / "unit.json").exists()
    assert doc["config"]["max_codewords"] == 4
    side = json.loads((tmp_path / "unit.json").read_text())
    assert side["config_sha256"] == res["config_sha256"]


def test_ber_config_file_with_flag_override(capsys, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "code": "ldpc-495-433",
        "snr_db": [10.0],
        "iterations": 10,
        "min_bit_errors": 1,
        "max_codewords": 4,
        "seed": 1,
        "out": str(tmp_path),
        "stem": "fromfile",
    }))
    code, out, _ = run_cli(capsys, "ber", "--config", str(cfg_file),
                           "--seed", "5")
    assert code == 0
    doc = parse_doc(out)
    assert doc["config"]["seed"] == 5       # flag wins
    assert doc["config"]["stem"] == "fromfile"
    assert (tmp_path / "fromfile.csv").exists()


def test_show_config_runs_nothing(capsys, tmp_path):
    code, out, _ = run_cli(capsys, *_ber_argv(tmp_path, "--show-config"))
    assert code == 0
    merged = json.loads(out)
    assert merged["snr_db"] == [10.0, 12.0]
    assert merged["stem"] == "unit"
    assert not (tmp_path / "unit.csv").exists()


def test_config_file_rejects_unknown_keys(capsys, tmp_path):
    cfg_file = tmp_path / "bad.json"
    cfg_file.write_text(json.dumps({"code": "ldpc-495-433", "snr": [4.0]}))
    code, _, err = run_cli(capsys, "ber", "--config", str(cfg_file))
    assert code == 1
    assert "unknown config keys" in err
    assert "snr" in err


def test_config_file_must_be_json_object(capsys, tmp_path):
    cfg_file = tmp_path / "bad.json"
    cfg_file.write_text("[1, 2]")
    code, _, err = run_cli(capsys, "code-info", "--config", str(cfg_file))
    assert code == 1
    assert "JSON object" in err

    cfg_file.write_text("{nope")
    code, _, err = run_cli(capsys, "code-info", "--config", str(cfg_file))
    assert code == 1
    assert "not valid JSON" in err

    code, _, err = run_cli(capsys, "code-info", "--config",
                           str(tmp_path / "missing.json"))
    assert code == 1
    assert "cannot read" in err


# ---------------------------------------------------------------------------
# oracle-check / predict-ops


def test_oracle_check_small(capsys):
    code, out, _ = run_cli(capsys, "oracle-check", "--size", "6",
                           "--count", "5", "--seed", "2")
    assert code == 0
    res = parse_doc(out)["result"]
    assert res["instances"] == 5
    assert res["marginal"] < 1e-8
    assert res["stationarity"] < 1e-9
    assert res["free_energy"] < 1e-6


@pytest.mark.parametrize("size", ["1", "17"])
def test_oracle_check_size_bounds(capsys, size):
    code, _, err = run_cli(capsys, "oracle-check", "--size", size)
    assert code == 1
    assert "[2, 16]" in err


def test_predict_ops_table(capsys):
    code, out, _ = run_cli(capsys, "predict-ops")
    assert code == 0
    rows = parse_doc(out)["result"]["rows"]
    counts = [(r["multiplies_per_symbol"], r["adds_per_symbol"])
              for r in rows]
    assert counts == [(26, 18), (520, 360), (24, 6), (18, 9), (486, 135)]
