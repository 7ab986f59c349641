"""Command-line harness: exit codes, artifacts, schema, reproducibility."""

import json
import os

import numpy as np
import pytest

from causalfield.cli import COMMANDS, default_config, main
from causalfield.errors import SchemaError
from causalfield.ioutil import (
    format_cell,
    load_config,
    merge_config,
    render_csv,
    render_json,
    resolved_model,
    validate_config,
)


def write_json(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_default_configs_validate():
    for cmd in COMMANDS:
        cfg = default_config(cmd)
        validate_config(cfg)
        assert set(cfg) == {"model", "region", "wave", "sweep"}


def test_resolved_model_defaults_regulator():
    cfg = {"model": {"N": 64, "a": 0.5, "m": 0.0}}
    assert resolved_model(cfg).mu == pytest.approx(2e-3)
    cfg = {"model": {"N": 64, "a": 0.5, "m": 0.0, "mu": 1e-4}}
    assert resolved_model(cfg).mu == 1e-4
    cfg = {"model": {"N": 64, "a": 0.5, "m": 1.0}}
    assert resolved_model(cfg).mu == 0.0


def test_validate_config_rejections():
    for bad in (
            {"model": {"banana": 3}},
            {"model": {"N": 12.5}},
            {"model": {"N": 1}},
            {"wave": {"width": 0.0}},
            {"wave": {"kind": "left"}},
            {"sweep": {"steps": 0}},
            {"sweep": {"dt": -1.0}},
            {"extra_section": {}},
    ):
        with pytest.raises(SchemaError):
            validate_config(bad)
    validate_config({})
    validate_config({"model": {"N": 32}})


def test_merge_is_two_level():
    merged = merge_config(default_config("sweep"), {"model": {"N": 64}})
    assert merged["model"]["N"] == 64
    assert merged["model"]["a"] == 1.0
    assert merged["region"] == default_config("sweep")["region"]


def test_format_cell_round_trips():
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(1.0) / 3.0) == repr(1.0 / 3.0)
    assert format_cell(7) == "7"
    assert format_cell(True) == "1"
    assert format_cell("ordered") == "ordered"
    assert format_cell(float("nan")) == "nan"


def test_render_csv_and_json_are_plain_text():
    csv = render_csv("a,b", [(1, 2.5), (3, float("nan"))])
    assert csv == "a,b\n1,2.5\n3,nan\n"
    js = render_json({"z": np.float64(2.0), "a": [np.int64(3), True]})
    assert json.loads(js) == {"a": [3, True], "z": 2.0}
    assert js.index('"a"') < js.index('"z"')


def test_sweep_command_artifacts(tmp_path):
    out = tmp_path / "run"
    assert main(["sweep", "--out", str(out)]) == 0
    header, rows = read_rows(out / "sweep.csv")
    assert header == ["t", "region_l", "region_r", "information", "cond_flag"]
    assert len(rows) == default_config("sweep")["sweep"]["steps"]
    assert all(r[4] == "0" for r in rows)
    info = [float(r[3]) for r in rows]
    assert info == sorted(info, reverse=True)
    meta = json.loads((out / "sweep.meta.json").read_text())
    assert meta["command"] == "sweep"
    assert meta["results"]["passed"] is True
    assert meta["conventions"]["symplectic"].startswith("Im vdot")
    assert meta["config"]["model"]["N"] == 128


def test_sweep_vacuum_is_zero_and_passes(tmp_path):
    cfg = write_json(tmp_path, "vac.json", {"wave": {"amplitude": 0.0}})
    out = tmp_path / "vac"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_rows(out / "sweep.csv")
    assert all(r[3] == "0.0" for r in rows)


def test_reruns_are_byte_identical(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["sweep", "--out", str(out)]) == 0
        assert main(["modular", "--out", str(out)]) == 0
    for name in ("sweep.csv", "sweep.meta.json", "modular.csv",
                 "modular.meta.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_malformed_config_exits_2_without_output(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(bad), "--out", str(out)]) == 2
    assert not out.exists()
    bad.write_text(json.dumps({"model": {"banana": 1}}))
    assert main(["sweep", "--config", str(bad), "--out", str(out)]) == 2
    assert not out.exists()
    bad.write_text(json.dumps([1, 2]))
    assert main(["sweep", "--config", str(bad), "--out", str(out)]) == 2
    assert not out.exists()


def test_impossible_geometry_exits_2(tmp_path):
    cfg = write_json(tmp_path, "geo.json", {"region": {"l": 30.0, "r": 20.0}})
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_config_exits_3(tmp_path):
    out = tmp_path / "out"
    rc = main(["sweep", "--config", str(tmp_path / "nope.json"),
               "--out", str(out)])
    assert rc == 3
    assert not out.exists()


def test_bad_flags_exit_2(tmp_path, capsys):
    assert main(["sweep", "--threads", "0", "--out", str(tmp_path)]) == 2
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_modular_command_spectrum(tmp_path):
    out = tmp_path / "m"
    assert main(["modular", "--out", str(out)]) == 0
    header, rows = read_rows(out / "modular.csv")
    assert header == ["index", "delta_eigenvalue"]
    evs = [float(r[1]) for r in rows]
    assert evs == sorted(evs, reverse=True)
    # spectrum of a standard factor is symmetric under inversion
    assert np.allclose(sorted(np.log(evs)), -np.log(evs), atol=1e-9)
    meta = json.loads((out / "modular.meta.json").read_text())
    assert meta["results"]["jdj_inverse_residual"] < 1e-8
    assert meta["results"]["centers"] == 0


def test_spectrum_command(tmp_path):
    out = tmp_path / "s"
    assert main(["spectrum", "--out", str(out)]) == 0
    header, rows = read_rows(out / "spectrum.csv")
    assert header == ["index", "omega"]
    assert len(rows) == 128
    meta = json.loads((out / "spectrum.meta.json").read_text())
    assert meta["results"]["passes"] is True
    assert meta["results"]["omega_min"] >= 0.0


def test_propagator_command(tmp_path):
    out = tmp_path / "p"
    cfg = write_json(tmp_path, "p.json",
                     {"region": {"l": -8.0, "r": 8.0},
                      "sweep": {"steps": 4, "dt": 1.0}})
    assert main(["propagator", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out / "propagator.csv")
    assert header == ["t", "x", "retarded", "advanced", "pauli_jordan",
                      "dyson_mean"]
    for r in rows:
        t, x, ret, adv, pj, dy = (float(v) for v in r)
        assert ret - adv == pytest.approx(pj, abs=1e-12)
        if t == 0.0 and abs(x) > 0.0:
            assert pj == 0.0
        if t > 0.0:
            assert adv == 0.0


def test_weyl_check_command_seeded(tmp_path):
    out = tmp_path / "w"
    assert main(["weyl-check", "--out", str(out), "--seed", "11"]) == 0
    header, rows = read_rows(out / "weyl_check.csv")
    assert header == ["pair", "relation", "phase_error", "wave_error"]
    labels = {r[1] for r in rows}
    assert labels == {"ordered", "spacelike"}
    meta = json.loads((out / "weyl_check.meta.json").read_text())
    assert meta["results"]["max_phase_error"] < 1e-4
    assert meta["results"]["max_wave_error"] < 1e-8
    assert meta["seed"] == 11


def test_huygens_command(tmp_path):
    out = tmp_path / "h"
    assert main(["huygens", "--out", str(out)]) == 0
    meta = json.loads((out / "huygens.meta.json").read_text())
    r = meta["results"]
    assert r["passed"] is True
    assert r["tail_max"] < r["tail_bound"]
    assert r["massive_tail_max"] > 1.0
    for name in ("huygens_massless.csv", "huygens_massive.csv"):
        header, rows = read_rows(out / name)
        assert header == ["t", "region_l", "region_r", "information",
                          "cond_flag"]
        assert len(rows) == 28


def test_load_config_requires_object(tmp_path):
    p = tmp_path / "arr.json"
    p.write_text("[1, 2]")
    with pytest.raises(SchemaError):
        load_config(str(p))
    assert load_config(None) == {}
