import json

import numpy as np
import pytest

from jkwalk import cli, harness
from jkwalk.errors import ValidationError

FIG = {"kappa": 3, "psi_phases_deg": [10, 30, 340]}


def _write(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _footer(text):
    out = {}
    for line in text.splitlines():
        if line.startswith("# "):
            k, v = line[2:].split("=", 1)
            out[k] = v
    return out


def test_config_rejects_bad_norm():
    with pytest.raises(ValidationError, match="unit norm"):
        harness.ExperimentConfig.from_dict({"kappa": 2, "psi": [1, 1]})


@pytest.mark.parametrize("bad", [
    {"kappa": 0},
    {"kappa": 2, "psi": [1, 0, 0]},
    {"kappa": 3, "bogus": 1},
    {"kappa": 3, "mode": "nope"},
    {"kappa": 3, "coin": {"type": "custom", "entries": [[1, 0], [1, 0], [1, 0], [1, 0]]}},
    {"kappa": 3, "r": 5},
    {"kappa": 3, "omega": [2, 0]},
])
def test_config_validation(bad):
    with pytest.raises(ValidationError):
        harness.ExperimentConfig.from_dict(bad)


def test_config_defaults_symmetric():
    cfg = harness.ExperimentConfig.from_dict({"kappa": 4})
    assert np.allclose(cfg.psi.array(), 0.5)


def test_fig2_parity_and_flatness():
    cfg = harness.ExperimentConfig.from_dict(
        {**FIG, "coin": {"type": "hadamard", "phase": 0.0}, "t": 400,
         "options": {"x0": 1, "t_start": 300}})
    res = harness.run_fig2(cfg)
    ts = [row[0] for row in res.rows]
    assert all(t % 2 == 1 for t in ts)
    pred = np.array([row[4] for row in res.rows])
    assert np.ptp(pred) == 0


def test_fig2_oscillation_predicted():
    cfg = harness.ExperimentConfig.from_dict(
        {**FIG, "coin": {"type": "hadamard", "phase": np.deg2rad(80)}, "t": 400,
         "options": {"x0": 1, "t_start": 300}})
    res = harness.run_fig2(cfg)
    assert res.footer["pred_rel_ptp"] > 0.1
    assert res.footer["sim_rel_ptp"] > 0.1


def test_fig3_rows_parity():
    cfg = harness.ExperimentConfig.from_dict(
        {**FIG, "coin": {"type": "hadamard", "phase": 0.0}, "t": 500, "x_max": 6})
    res = harness.run_fig3(cfg)
    for row in res.rows:
        if (row[0] + row[1]) % 2:
            assert row[3] == 0 and row[4] == 0
    assert res.footer["pred_decay_rate"] == pytest.approx(res.footer["ln_K_plus_over_a2"] / 1)


def test_fig4_halfline_runs():
    cfg = harness.ExperimentConfig.from_dict(
        {"kappa": 1, "psi": [1.0], "coin": {"type": "hadamard"}, "t": 400})
    res = harness.run_fig4(cfg)
    assert res.footer["atom"] == 0
    assert res.footer["beyond_support_mass"] < 1e-3
    assert sum(r[3] for r in res.rows) == pytest.approx(1, abs=1e-9)


def test_ks_distance_simple():
    xs = np.array([0.25, 0.75])
    w = np.array([0.5, 0.5])
    assert harness.ks_distance(xs, w, xs) == pytest.approx(0.25)


def test_cli_compare_ok(tmp_path):
    cfg = _write(tmp_path, "c.json", {**FIG, "coin": {"type": "hadamard", "phase": 1.2},
                                      "mode": "reduction", "t": 30})
    out = tmp_path / "o.csv"
    assert cli.main(["compare", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0].startswith("t,x,r,simulated,predicted")
    foot = _footer(text)
    assert float(foot["max_abs_err"]) < 1e-10 and "tolerance" in foot


def test_cli_bad_norm_exit1(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"kappa": 2, "psi": [1, 1]})
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    assert "unit norm" in capsys.readouterr().err


def test_cli_usage_exit1(tmp_path):
    cfg = _write(tmp_path, "c.json", FIG)
    assert cli.main(["frobnicate", "--config", str(cfg)]) == 1
    assert cli.main(["simulate", "--config", str(cfg), "--bogus"]) == 1
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.json")]) == 1


def test_cli_genfun_tolerance_exit2(tmp_path):
    cfg = _write(tmp_path, "g.json", {**FIG, "t": 10, "x_max": 3})
    assert cli.main(["genfun-check", "--config", str(cfg)]) == 0
    assert cli.main(["genfun-check", "--config", str(cfg), "--tolerance", "-1"]) == 2


def test_cli_tree_check(tmp_path):
    cfg = _write(tmp_path, "t.json", {"kappa": 3, "kappa_prime": 2,
                                      "omega": [0.5, np.sqrt(3) / 2],
                                      "psi": [[0.6, 0], [0, 0.8]], "t": 6})
    assert cli.main(["tree-check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_cli_theory_and_overrides(tmp_path):
    cfg = _write(tmp_path, "c.json", {**FIG, "coin": {"type": "hadamard", "phase": 0.9}})
    out = tmp_path / "o.csv"
    assert cli.main(["theory", "--config", str(cfg), "--out", str(out), "--t", "7"]) == 0
    text = out.read_text()
    assert text.startswith("x_or_t,quantity,value")
    foot = _footer(text)
    assert foot["t"] == "7"
    assert float(foot["total_mass_all_branches"]) == pytest.approx(1, abs=1e-9)


def test_determinism(tmp_path):
    cfg = _write(tmp_path, "g.json", {**FIG, "t": 12, "x_max": 4, "options": {"coins": 2}})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        cli.main(["genfun-check", "--config", str(cfg), "--out", str(out), "--seed", "5"])
    assert a.read_bytes() == b.read_bytes()
    cli.main(["genfun-check", "--config", str(cfg), "--out", str(b), "--seed", "6"])
    assert a.read_bytes() != b.read_bytes()
