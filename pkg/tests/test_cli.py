import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from halfline_utm.cli import ConfigError, RunConfig, main
from halfline_utm.io import read_field

GOLDEN = Path(__file__).parent / "golden" / "solve_dirichlet_bump_T1.sha256"


def _sha(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_config_round_trip():
    cfg = RunConfig(command="verify")
    cfg.verify.pairs = ["inf:2", "6:6"]
    cfg.verify.s = [0.5]
    text = cfg.to_json()
    again = RunConfig.from_json(text)
    assert again == cfg and again.to_json() == text


def test_config_rejects_unknown_keys_and_versions():
    d = RunConfig().to_dict()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**d, "version": 2})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**d, "bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**d, "solve": {"kindd": "dirichlet"}})
    with pytest.raises(ConfigError):
        RunConfig.from_json("{not json")


def test_golden_bump_checksum(tmp_path):
    assert main(["solve", "--kind", "dirichlet", "--profile", "bump", "--T", "1",
                 "--out", str(tmp_path)]) == 0
    assert _sha(tmp_path / "field.bin") == GOLDEN.read_text().split()[0]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["files"]["field.bin"] == _sha(tmp_path / "field.bin")
    assert manifest["T_prime"] == 1.25 and "K_max_H1" in manifest


def test_manifest_reproduces_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "--kind", "neumann", "--profile", "chirp", "--n-t", "11",
                 "--out", str(a)]) == 0
    cfg = json.loads((a / "manifest.json").read_text())["config"]
    cfg["out_dir"] = str(b)
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["solve", "--config", str(tmp_path / "cfg.json")]) == 0
    for name in ("field.bin", "field.csv", "trace.csv", "boundary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_zero_profile_gives_zero_field(tmp_path):
    assert main(["solve", "--profile", "zero", "--n-t", "5", "--out", str(tmp_path)]) == 0
    assert not np.any(read_field(tmp_path / "field.bin").values)


def test_reunify_records_t_prime(tmp_path, monkeypatch):
    monkeypatch.setenv("UTM_HALFLINE_OUT", str(tmp_path))
    assert main(["reunify", "--kind", "dirichlet", "--profile", "bump", "--T", "0.5",
                 "--x-max", "6", "--dx", "0.1", "--dt", "0.005"]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["T_prime"] == pytest.approx(1.25 * 0.5)
    assert manifest["config"]["solve"]["reunify"] is True
    assert read_field(tmp_path / "field.bin").t_grid.n == 101


def test_input_csv(tmp_path):
    from halfline_utm.io import signal_to_csv
    from halfline_utm.profiles import named_boundary_profile
    h = named_boundary_profile("pulse", 1.0, 0.0025)
    (tmp_path / "h.csv").write_text(signal_to_csv(h))
    out = tmp_path / "o"
    assert main(["solve", "--input-csv", str(tmp_path / "h.csv"), "--n-t", "11",
                 "--out", str(out)]) == 0
    ref = tmp_path / "r"
    assert main(["solve", "--profile", "pulse", "--n-t", "11", "--out", str(ref)]) == 0
    assert (out / "field.bin").read_bytes() == (ref / "field.bin").read_bytes()


def test_verify_errors_and_empty(tmp_path, capsys):
    assert main(["verify", "--pairs", "4:4", "--out", str(tmp_path)]) == 2
    assert "not admissible" in capsys.readouterr().err
    assert main(["verify", "--theorem", "3.5i", "--s", "0.25", "--out", str(tmp_path)]) == 2
    assert main(["verify", "--pairs", "", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["reports"] == []


def test_verify_fan_out(tmp_path):
    args = ["verify", "--theorem", "3.4", "--pairs", "inf:2,8:4,6:6", "--s", "0,0.25",
            "--base-size", "2", "--enriched-size", "3", "--T-primes", "1,2"]
    assert main(args + ["--out", str(tmp_path / "a")]) in (0, 1)
    reports = json.loads((tmp_path / "a" / "manifest.json").read_text())["reports"]
    assert len(reports) == 6
    assert len(list((tmp_path / "a").glob("ratios_3.4_*.csv"))) == 6
    # determinism: identical config and seed give identical CSVs
    assert main(args + ["--out", str(tmp_path / "b")]) in (0, 1)
    for f in (tmp_path / "a").glob("*.csv"):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_kernel_scan_restriction_and_refine(tmp_path):
    small = ["--tau-n", "11", "--t-n", "5", "--k-n", "21"]
    assert main(["kernel-scan", "--lemma", "4.1", "--out", str(tmp_path)] + small) == 0
    assert sorted(p.name for p in tmp_path.glob("scan_*.csv")) == ["scan_lemma_4.1.csv"]
    rep = json.loads((tmp_path / "manifest.json").read_text())["reports"]
    assert len(rep) == 1 and rep[0]["refinement_ratio"] is not None
    assert main(["kernel-scan", "--lemma", "4.1", "--refine", "2", "--out",
                 str(tmp_path / "r")] + small) == 0
    csv_lines = (tmp_path / "r" / "scan_lemma_4.1.csv").read_text().splitlines()
    assert len(csv_lines) == 1 + 9          # t grid 5 -> 9 after doubling


def test_bad_flag_value_exits_nonzero(tmp_path):
    assert main(["solve", "--kind", "robin", "--out", str(tmp_path)]) == 2
    assert main(["solve", "--dt", "-1", "--out", str(tmp_path)]) == 2
