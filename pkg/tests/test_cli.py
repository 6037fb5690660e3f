import json
from pathlib import Path

import numpy as np
import pytest

import sosfacet as sf
from sosfacet.cli import main


def _read_summary(run_dir: Path) -> dict:
    return json.loads((run_dir / "summary.json").read_text())


def test_simulate_writes_run_dir(tmp_path):
    out = tmp_path / "run"
    rc = main(["simulate", "--out", str(out), "--n", "8", "--sweeps", "100",
               "--burn-in", "20", "--thin", "10", "--seed", "1"])
    assert rc == 0
    assert (out / "config.json").exists()
    assert (out / "metadata.json").exists()
    lines = (out / "samples.ndjson").read_text().splitlines()
    assert len(lines) == (100 - 20) // 10
    summary = _read_summary(out)
    assert summary["samples"] == len(lines)
    assert "f2_large_fraction" in summary


def test_simulate_deterministic_except_metadata(tmp_path):
    args = ["simulate", "--n", "6", "--sweeps", "50", "--burn-in", "10",
            "--seed", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    for name in ("config.json", "samples.ndjson", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 6, "sweeps": 40, "burn_in": 5, "seed": 9}))
    out = tmp_path / "run"
    assert main(["simulate", "--out", str(out), "--config", str(cfg),
                 "--sweeps", "30"]) == 0
    resolved = json.loads((out / "config.json").read_text())
    assert resolved["n"] == 6 and resolved["sweeps"] == 30 and resolved["seed"] == 9


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nn": 6}))
    assert main(["simulate", "--out", str(tmp_path / "r"),
                 "--config", str(cfg)]) == 1


def test_analyze_stored_fields(tmp_path):
    fields = tmp_path / "fields.ndjson"
    h = np.full((8, 8), 4, dtype=np.int64)
    with fields.open("w") as f:
        f.write(sf.HeightField(8, h).to_json() + "\n")
        f.write(sf.HeightField(8, h + 1).to_json() + "\n")
    out = tmp_path / "run"
    assert main(["analyze", "--out", str(out), "--fields", str(fields)]) == 0
    rows = [json.loads(x) for x in (out / "samples.ndjson").read_text().splitlines()]
    assert len(rows) == 2
    assert rows[0]["facet"]["level"] == 4
    assert rows[1]["facet"]["level"] == 5


def test_isoperimetry_small(tmp_path):
    out = tmp_path / "iso"
    rc = main(["isoperimetry", "--out", str(out), "--table-max", "8",
               "--scan-max", "10000", "--grid-n", "20"])
    summary = _read_summary(out)
    assert summary["oracle_match"] is True
    assert summary["sqrt_bound_violations"] == 0
    assert summary["negative_control"]["gain"] == -2
    assert summary["negative_control"]["hypothesis_violating"] is True
    # exit code reflects the built-in check result
    assert rc == (0 if summary["pass"] else 2)
    table = (out / "perimeter_table.csv").read_text().splitlines()
    assert table[0].startswith("# schema=sosfacet/")
    assert len(table) == 2 + 8


def test_hairs_scales(tmp_path):
    out = tmp_path / "hairs"
    assert main(["hairs", "--out", str(out), "--scale-n", "100",
                 "--c2", "80"]) == 0
    lines = (out / "scales.csv").read_text().splitlines()
    assert lines[0].startswith("# schema=")
    assert len(lines) > 3


def test_vershik_small(tmp_path):
    out = tmp_path / "v"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 50, "samples": 20, "seed": 4,
                               "monolayer_k": [100, 1000]}))
    assert main(["vershik", "--out", str(out), "--config", str(cfg)]) == 0
    summary = _read_summary(out)
    assert summary["mean_deviation"] > 0
    mono = (out / "monolayer.csv").read_text().splitlines()
    assert len(mono) == 2 + 2


def test_oracle_uniformity(tmp_path):
    out = tmp_path / "o"
    assert main(["oracle", "--out", str(out), "--n", "5",
                 "--draws", "20000", "--seed", "2"]) == 0
    summary = _read_summary(out)
    assert summary["partitions"] == 7
    assert summary["max_abs_deviation"] < 0.03
    freq = (out / "frequencies.csv").read_text().splitlines()
    assert len(freq) == 2 + 7


def test_oracle_rejects_large_n(tmp_path):
    assert main(["oracle", "--out", str(tmp_path / "o"), "--n", "20"]) == 1
