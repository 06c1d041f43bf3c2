import json

import numpy as np
import pytest
import yaml

import thermoflux.sweep as sweep_mod
from thermoflux import BathSpec, ModelConfig, TlsHoParams
from thermoflux.cli import EXIT_CONFIG, EXIT_CROSSCHECK, EXIT_OK, EXIT_SOLVER, main
from thermoflux.sweep import (
    CSV_COLUMNS,
    Scenario,
    SweepMode,
    SweepSpec,
    TlsSweepSpec,
    classify_scenario,
    figure_preset,
    read_rows_csv,
    run_sweep,
    run_tls_sweep,
    write_rows_csv,
)


def small_grid():
    return (0.5, 1.0, 1.5)


def linear_template(dim=30):
    return ModelConfig(
        omega=1.0, dim=dim,
        left=BathSpec(temperature=1.0, gamma=0.3),
        right=BathSpec(temperature=1.0, gamma=0.1),
    )


def full_template(dim=25):
    return ModelConfig(
        omega=1.0, dim=dim,
        left=BathSpec(temperature=1.0, gamma=0.2, Gamma_two=0.1),
        right=BathSpec(temperature=1.0, gamma=0.2, Gamma_two=0.01),
    )


def write_yaml(path, payload):
    path.write_text(yaml.safe_dump(payload), encoding="utf-8")


def base_config_payload(**overrides):
    payload = {
        "model": {"omega": 1.0, "dim": 25},
        "bath": {
            "left": {"T": 2.0, "gamma": 0.2, "Gamma2": 0.1},
            "right": {"T": 0.5, "gamma": 0.2, "Gamma2": 0.01},
        },
        "sweep": {"mode": "fix_left_vary_right", "fixed_T": 2.0, "values": [0.5, 1.0]},
        "solver": {"sector": "auto", "tolerance": 1.0e-10},
        "output": {"csv_path": "out.csv", "meta_path": "out.meta.json"},
    }
    payload.update(overrides)
    return payload


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------

def test_sweep_spec_validation():
    cfg = linear_template()
    with pytest.raises(ValueError):
        SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, (), cfg)
    with pytest.raises(ValueError):
        SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, (1.0, 0.5), cfg)
    with pytest.raises(ValueError):
        SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, (-1.0, 0.5), cfg)


def test_scenario_classification():
    assert classify_scenario(linear_template()) is Scenario.LINEAR
    assert classify_scenario(full_template()) is Scenario.FULL
    two = ModelConfig(omega=1.0, dim=10,
                      left=BathSpec(temperature=1.0, Gamma_two=0.1),
                      right=BathSpec(temperature=2.0, Gamma_two=0.01))
    assert classify_scenario(two) is Scenario.TWO_PHOTON
    asym = ModelConfig(omega=1.0, dim=10,
                       left=BathSpec(temperature=1.0, gamma=0.2, Gamma_two=0.1),
                       right=BathSpec(temperature=2.0, gamma=0.2))
    assert classify_scenario(asym) is Scenario.ASYMMETRIC


def test_point_config_modes():
    spec = SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, small_grid(), linear_template())
    cfg = spec.point_config(0.7)
    assert (cfg.left.temperature, cfg.right.temperature) == (2.0, 0.7)
    spec2 = SweepSpec(SweepMode.FIX_RIGHT_VARY_LEFT, 2.0, small_grid(), linear_template())
    cfg2 = spec2.point_config(0.7)
    assert (cfg2.left.temperature, cfg2.right.temperature) == (0.7, 2.0)


def test_linear_sweep_rows_carry_exact_analytics():
    spec = SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 1.5, small_grid(), linear_template(dim=45))
    rows = run_sweep(spec)
    for row in rows:
        assert row.analytic_R == 0.0
        if abs(row.T_varied - 1.5) > 1e-12:
            assert row.J_forward == pytest.approx(row.analytic_J, rel=1e-8)
            assert row.R <= 1e-10
        assert row.residual < 1e-10


def test_workers_do_not_change_results():
    spec = SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, small_grid(), full_template())
    serial = run_sweep(spec, workers=1)
    threaded = run_sweep(spec, workers=3)
    assert serial == threaded  # bitwise identical rows, in order


def test_tls_sweep_runs():
    spec = TlsSweepSpec(
        mode=SweepMode.FIX_LEFT_VARY_RIGHT,
        fixed_T=3.0,
        T_values=(1.0, 2.0),
        left=TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.1, kappa=0.05, temperature=1.0),
        right=TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.1, kappa=0.005, temperature=1.0),
        dim=20,
    )
    rows = run_tls_sweep(spec)
    assert len(rows) == 2
    for row in rows:
        assert 0.0 <= row.R <= 1.0
        assert row.analytic_J is None
        assert row.R > 0.0  # asymmetric contact hardware rectifies


# ---------------------------------------------------------------------------
# CSV and metadata files
# ---------------------------------------------------------------------------

def test_csv_roundtrip_and_determinism(tmp_path):
    spec = SweepSpec(SweepMode.FIX_LEFT_VARY_RIGHT, 2.0, small_grid(), full_template())
    rows = run_sweep(spec)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_rows_csv(rows, p1)
    write_rows_csv(rows, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert read_rows_csv(p1) == rows  # repr round-trips every float exactly
    header = p1.read_text().splitlines()
    assert header[0].startswith("# schema=")
    assert header[1] == ",".join(CSV_COLUMNS)


def test_figure_presets_cover_all_figures():
    for fig in ("fig2", "fig3", "fig4", "fig5"):
        presets = figure_preset(fig)
        assert presets
        for _, spec in presets:
            assert np.all(np.asarray(spec.T_values) > 0)
    with pytest.raises(ValueError):
        figure_preset("fig9")


def test_fig2_preset_is_pure_two_photon_and_deep():
    presets = dict(figure_preset("fig2"))
    assert set(presets) == {"GammaR=0.001", "GammaR=0.01"}
    for spec in presets.values():
        assert classify_scenario(spec.config) is Scenario.TWO_PHOTON
        assert spec.config.dim >= 100  # keeps the closed-form column converged


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_run_writes_outputs(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    write_yaml(cfg_path, base_config_payload())
    assert main(["run", str(cfg_path), "--out", str(tmp_path)]) == EXIT_OK
    csv_path = tmp_path / "out.csv"
    meta_path = tmp_path / "out.meta.json"
    assert csv_path.exists() and meta_path.exists()
    meta = json.loads(meta_path.read_text())
    assert meta["config"]["bath"]["left"]["T"] == 2.0
    assert meta["diagnostics"]["scenario"] == "full"
    assert meta["diagnostics"]["rows"] == 2
    assert "code_version" in meta and "wall_time_s" in meta


def test_cli_metadata_roundtrip_reproduces_csv(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    write_yaml(cfg_path, base_config_payload())
    main(["run", str(cfg_path), "--out", str(tmp_path / "first")])
    first_csv = (tmp_path / "first" / "out.csv").read_bytes()
    sidecar = tmp_path / "first" / "out.meta.json"
    assert main(["run", str(sidecar), "--out", str(tmp_path / "second")]) == EXIT_OK
    assert (tmp_path / "second" / "out.csv").read_bytes() == first_csv


def test_cli_invalid_config_exits_1_and_names_key(tmp_path, capsys):
    cfg_path = tmp_path / "bad.yaml"
    payload = base_config_payload()
    payload["bath"]["left"]["T"] = -2.0
    write_yaml(cfg_path, payload)
    out_dir = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out", str(out_dir)]) == EXIT_CONFIG
    assert "bath.left.T" in capsys.readouterr().err
    assert not out_dir.exists()  # no output files on config failure


def test_cli_missing_key_exits_1(tmp_path, capsys):
    cfg_path = tmp_path / "bad.yaml"
    payload = base_config_payload()
    del payload["sweep"]["mode"]
    write_yaml(cfg_path, payload)
    assert main(["run", str(cfg_path)]) == EXIT_CONFIG
    assert "sweep.mode" in capsys.readouterr().err


def test_cli_degenerate_full_sector_exits_2(tmp_path):
    payload = base_config_payload()
    payload["bath"]["left"] = {"T": 2.0, "Gamma2": 0.1}
    payload["bath"]["right"] = {"T": 0.5, "Gamma2": 0.001}
    payload["solver"] = {"sector": "full"}
    cfg_path = tmp_path / "deg.yaml"
    write_yaml(cfg_path, payload)
    assert main(["run", str(cfg_path), "--out", str(tmp_path)]) == EXIT_SOLVER


def test_cli_crosscheck_failure_exits_3(tmp_path, monkeypatch):
    from thermoflux.transport import CrossCheckFailed

    def boom(*args, **kwargs):
        raise CrossCheckFailed("synthetic")

    monkeypatch.setattr("thermoflux.cli.run_sweep", boom)
    cfg_path = tmp_path / "cfg.yaml"
    write_yaml(cfg_path, base_config_payload())
    assert main(["run", str(cfg_path), "--out", str(tmp_path)]) == EXIT_CROSSCHECK


def test_cli_env_var_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("THERMOFLUX_OUT", str(tmp_path / "envdir"))
    cfg_path = tmp_path / "cfg.yaml"
    write_yaml(cfg_path, base_config_payload())
    assert main(["run", str(cfg_path)]) == EXIT_OK
    assert (tmp_path / "envdir" / "out.csv").exists()


def test_cli_run_with_plot(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    write_yaml(cfg_path, base_config_payload())
    assert main(["run", str(cfg_path), "--out", str(tmp_path), "--plot"]) == EXIT_OK
    png = tmp_path / "out.png"
    assert png.exists() and png.stat().st_size > 0


def test_cli_tls_scenario(tmp_path):
    payload = {
        "model": {"omega": 1.0, "dim": 15},
        "tls": {
            "left": {"omega_o": 5.0, "g": 0.1, "kappa": 0.05, "T": 3.0},
            "right": {"omega_o": 5.0, "g": 0.1, "kappa": 0.005, "T": 1.0},
            "filter": "none",
        },
        "sweep": {"mode": "fix_left_vary_right", "fixed_T": 3.0, "values": [1.0, 2.0]},
    }
    cfg_path = tmp_path / "tls.yaml"
    write_yaml(cfg_path, payload)
    assert main(["run", str(cfg_path), "--out", str(tmp_path)]) == EXIT_OK
    rows = read_rows_csv(tmp_path / "run.csv")
    assert all(row.R > 0 for row in rows)


def test_cli_reproduce_fig2_small_grid(tmp_path, monkeypatch):
    # shrink the preset grid so the end-to-end path stays fast
    monkeypatch.setattr(sweep_mod, "_GRID", (0.5, 1.0, 3.0))
    assert main(["reproduce", "fig2", "--out", str(tmp_path)]) == EXIT_OK
    for label in ("GammaR0.001", "GammaR0.01"):
        csv_path = tmp_path / f"fig2_{label}.csv"
        assert csv_path.exists()
        rows = read_rows_csv(csv_path)
        assert len(rows) == 3
        # closed-form column tracks the numerics on the reproduction grid
        for row in rows:
            assert row.J_forward == pytest.approx(row.analytic_J, rel=1e-6)
            assert row.R == pytest.approx(row.analytic_R, rel=1e-5, abs=1e-9)
        meta = json.loads((tmp_path / f"fig2_{label}.meta.json").read_text())
        assert meta["diagnostics"]["sector"] == "even"
    assert (tmp_path / "fig2.png").exists()


def test_cli_version_and_help():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
