import csv
import json

import pytest

from resurge import cli, config
from resurge.errors import ConfigError


def _record(out):
    rec = json.loads((out / "record.json").read_text())
    rec["config"].pop("output")
    return rec


def test_defaults_filled():
    cfg = config.validate({"germ": "quad"})
    assert cfg["m_list"] == [1, -1]
    assert cfg["oracle"]["M"] == 64


@pytest.mark.parametrize("raw", [
    {},
    {"germ": "no-such-germ"},
    {"germ": "quad", "k_max": -1},
    {"germ": "quad", "m_list": [0]},
    {"germ": "quad", "oracle": {"M": 48}},
    {"germ": "quad", "path_override": [[1, 0], [1, 6.283185307179586]]},
    {"germ": "quad", "surprise": 1},
    {"germ": {"type": "rational_infinity"}},
])
def test_invalid_configs(raw):
    with pytest.raises(ConfigError):
        config.validate(raw)


def test_path_override_with_single_index():
    cfg = config.validate({"germ": "quad", "m_list": [1], "path_override": [[1, 0], [1, 6.283185307179586]]})
    assert len(cfg["path_override"]) == 2


def test_bad_germ_exit_code(tmp_path, capsys):
    assert cli.main(["invariants", "--germ", "nope", "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "invalid config" in capsys.readouterr().err


def test_unreadable_config_exit_code(tmp_path):
    bad = tmp_path / "c.json"
    bad.write_text("{not json")
    assert cli.main(["invariants", "--config", str(bad)]) == cli.EXIT_CONFIG


def test_translation_run_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["invariants", "--germ", "translation", "--kmax", "2", "--precision", "64",
                         "--out", str(out), "--quiet"]) == cli.EXIT_OK
    rec = _record(a)
    assert rec == _record(b)
    assert set(rec["residua"]) == {"1", "-1"}


def test_warm_cache_gives_same_record(tmp_path, monkeypatch):
    monkeypatch.setenv("RESURGE_CACHE_DIR", str(tmp_path / "cache"))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"germ": "rho0", "quadrature": {"estimate_errors": False}}))
    args = ["invariants", "--config", str(cfg), "--m", "1", "--kmax", "1", "--precision", "64", "--quiet"]
    assert cli.main(args + ["--out", str(tmp_path / "cold")]) == cli.EXIT_OK
    assert any((tmp_path / "cache").iterdir())
    assert cli.main(args + ["--out", str(tmp_path / "warm")]) == cli.EXIT_OK
    assert _record(tmp_path / "cold") == _record(tmp_path / "warm")


def test_oracle_writes_horn_samples(tmp_path):
    assert cli.main(["oracle", "--germ", "quad", "--out", str(tmp_path), "--quiet"]) == cli.EXIT_OK
    for side in ("up", "low"):
        with open(tmp_path / f"horn_{side}.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["X", "re_h", "im_h"]
        assert len(rows) == 65


def test_convergence_failure_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"germ": "quad", "oracle": {"n_escape": 1}, "output": str(tmp_path / "o")}))
    assert cli.main(["oracle", "--config", str(cfg), "--quiet"]) == cli.EXIT_CONVERGENCE
    rec = json.loads((tmp_path / "o" / "record.json").read_text())
    assert rec["error"]["type"] == "OrbitEscapesDomain"


def test_compare_without_oracle_modes_fails(tmp_path):
    code = cli.main(["compare", "--germ", "translation", "--m", "1", "--kmax", "2", "--precision", "64",
                     "--out", str(tmp_path), "--quiet"])
    assert code == cli.EXIT_FAIL
    assert _record(tmp_path)["comparison"]["rows"][0]["verdict"] == "NO-ORACLE"


def test_profile_csv(tmp_path):
    assert cli.main(["profile", "--germ", "rho0", "--m", "1", "--precision", "64", "--k", "0",
                     "--out", str(tmp_path), "--quiet"]) == cli.EXIT_OK
    with open(tmp_path / "profile_m1_k0.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "s"
    assert len(rows) > 10


def test_selftest_subset(tmp_path):
    assert cli.main(["selftest", "--only", "2", "--out", str(tmp_path), "--quiet"]) == cli.EXIT_OK
    data = json.loads((tmp_path / "selftest.json").read_text())
    assert [d["criterion"] for d in data] == [2]
    assert data[0]["passed"]
