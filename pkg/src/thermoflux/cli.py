"""Command-line interface.

Subcommands:

* ``run <config>``: execute one sweep described by a YAML/JSON config file,
  writing a CSV table and a JSON metadata sidecar (plus an optional plot).
* ``reproduce <fig2|fig3|fig4|fig5>``: regenerate the data behind one of
  the published figures (CSV per curve set, one PNG per figure).
* ``check``: run the built-in invariant fixtures and report PASS/FAIL.

Exit codes: 0 success, 1 configuration error (the message names the
offending key), 2 solver failure, 3 internal cross-check failure.

The default output directory is ``--out``, else ``$THERMOFLUX_OUT``,
else the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .fock import BathSpec, ModelConfig
from .steady import CutoffExceeded, DegenerateSteadyState, NonConvergent, Sector
from .sweep import (
    FIGURE_IDS,
    Scenario,
    SweepMode,
    SweepSpec,
    TlsSweepSpec,
    classify_scenario,
    figure_preset,
    run_sweep,
    run_tls_sweep,
    sweep_diagnostics,
    write_metadata,
    write_rows_csv,
)
from .tls_reduction import FilterMode, InvertedRates, NegativeRate, TlsHoParams
from .transport import CrossCheckFailed

OUT_ENV_VAR = "THERMOFLUX_OUT"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_CROSSCHECK = 3

_SOLVER_ERRORS = (DegenerateSteadyState, NonConvergent, CutoffExceeded, InvertedRates, NegativeRate)


class ConfigError(Exception):
    """Configuration problem, annotated with the offending key path."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------

def _get(mapping, key_path: str, required: bool = True, default=None):
    node = mapping
    walked = []
    for part in key_path.split("."):
        walked.append(part)
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(".".join(walked), "missing")
            return default
        node = node[part]
    return node


def _number(mapping, key_path: str, *, positive=False, nonnegative=False, required=True, default=None):
    value = _get(mapping, key_path, required=required, default=default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key_path, f"expected a number, got {value!r}")
    value = float(value)
    if positive and not value > 0:
        raise ConfigError(key_path, f"must be > 0, got {value}")
    if nonnegative and value < 0:
        raise ConfigError(key_path, f"must be >= 0, got {value}")
    return value


def load_config_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(str(path), "file not found")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".json":
            # YAML 1.1 misreads bare JSON exponents like 1e-10 as strings
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(str(path), f"unparseable: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(str(path), "top level must be a mapping")
    # metadata sidecars echo the config under a 'config' key; accept them
    if "config" in data and "schema" in data:
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError("config", "sidecar echo must be a mapping")
    return data


def _parse_sweep_values(raw: dict) -> tuple[float, ...]:
    values = _get(raw, "sweep.values", required=False)
    range_spec = _get(raw, "sweep.range", required=False)
    if (values is None) == (range_spec is None):
        raise ConfigError("sweep", "exactly one of 'values' or 'range' is required")
    if values is not None:
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values", "must be a nonempty list of numbers")
        out = []
        for i, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"sweep.values[{i}]", f"must be a positive number, got {v!r}")
            out.append(float(v))
        if any(b <= a for a, b in zip(out, out[1:])):
            raise ConfigError("sweep.values", "must be strictly increasing")
        return tuple(out)
    start = _number(range_spec, "start", positive=True)
    stop = _number(range_spec, "stop", positive=True)
    num = _get(range_spec, "num")
    if not isinstance(num, int) or isinstance(num, bool) or num < 2:
        raise ConfigError("sweep.range.num", f"must be an integer >= 2, got {num!r}")
    spacing = _get(range_spec, "spacing", required=False, default="geometric")
    if spacing not in ("geometric", "linear"):
        raise ConfigError("sweep.range.spacing", f"must be 'geometric' or 'linear', got {spacing!r}")
    if not stop > start:
        raise ConfigError("sweep.range", f"stop {stop} must exceed start {start}")
    grid = np.geomspace(start, stop, num) if spacing == "geometric" else np.linspace(start, stop, num)
    return tuple(float(t) for t in grid)


def _parse_mode(raw: dict) -> SweepMode:
    mode = _get(raw, "sweep.mode")
    try:
        return SweepMode(mode)
    except ValueError:
        raise ConfigError(
            "sweep.mode",
            f"must be one of {[m.value for m in SweepMode]}, got {mode!r}",
        ) from None


def _parse_sector(raw: dict) -> Sector | None:
    sector = _get(raw, "solver.sector", required=False, default="auto")
    if sector == "auto":
        return None
    try:
        return Sector(sector)
    except ValueError:
        raise ConfigError(
            "solver.sector",
            f"must be 'auto' or one of {[s.value for s in Sector]}, got {sector!r}",
        ) from None


def _parse_dim(raw: dict) -> int:
    dim = _get(raw, "model.dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 3:
        raise ConfigError("model.dim", f"must be an integer >= 3, got {dim!r}")
    return dim


def _parse_bath(raw: dict, side: str) -> BathSpec:
    prefix = f"bath.{side}"
    return BathSpec(
        temperature=_number(raw, f"{prefix}.T", positive=True),
        gamma=_number(raw, f"{prefix}.gamma", nonnegative=True, required=False, default=0.0),
        Gamma_two=_number(raw, f"{prefix}.Gamma2", nonnegative=True, required=False, default=0.0),
    )


def _parse_tls_side(raw: dict, side: str, omega_a: float) -> TlsHoParams:
    prefix = f"tls.{side}"
    return TlsHoParams(
        omega_o=_number(raw, f"{prefix}.omega_o", positive=True),
        omega_a=omega_a,
        g=_number(raw, f"{prefix}.g"),
        kappa=_number(raw, f"{prefix}.kappa", positive=True),
        temperature=_number(raw, f"{prefix}.T", positive=True),
    )


def parse_config(raw: dict):
    """Validate a raw config mapping into a sweep spec plus run options.

    Returns (spec, options) where spec is a SweepSpec or TlsSweepSpec and
    options carries solver tolerance and output paths.
    """
    omega = _number(raw, "model.omega", positive=True)
    dim = _parse_dim(raw)
    mode = _parse_mode(raw)
    fixed_T = _number(raw, "sweep.fixed_T", positive=True)
    t_values = _parse_sweep_values(raw)
    tolerance = _number(raw, "solver.tolerance", positive=True, required=False, default=1e-10)
    options = {
        "tolerance": tolerance,
        "csv_path": _get(raw, "output.csv_path", required=False, default="run.csv"),
        "meta_path": _get(raw, "output.meta_path", required=False, default="run.meta.json"),
    }

    has_bath = _get(raw, "bath", required=False) is not None
    has_tls = _get(raw, "tls", required=False) is not None
    if has_bath == has_tls:
        raise ConfigError("bath", "exactly one of 'bath' or 'tls' sections is required")

    if has_bath:
        config = ModelConfig(
            omega=omega,
            dim=dim,
            left=_parse_bath(raw, "left"),
            right=_parse_bath(raw, "right"),
        )
        spec = SweepSpec(
            mode=mode,
            fixed_T=fixed_T,
            T_values=t_values,
            config=config,
            sector_policy=_parse_sector(raw),
        )
        return spec, options

    filter_raw = _get(raw, "tls.filter", required=False, default="none")
    try:
        filter_mode = FilterMode(filter_raw)
    except ValueError:
        raise ConfigError(
            "tls.filter",
            f"must be one of {[f.value for f in FilterMode]}, got {filter_raw!r}",
        ) from None
    spec = TlsSweepSpec(
        mode=mode,
        fixed_T=fixed_T,
        T_values=t_values,
        left=_parse_tls_side(raw, "left", omega),
        right=_parse_tls_side(raw, "right", omega),
        dim=dim,
        filter_mode=filter_mode,
    )
    return spec, options


def _config_echo(raw: dict) -> dict:
    """Round-trippable copy of the validated config."""
    return json.loads(json.dumps(raw))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _resolve_out_dir(arg_out: str | None) -> Path:
    if arg_out:
        return Path(arg_out)
    env = os.environ.get(OUT_ENV_VAR)
    return Path(env) if env else Path(".")


def _resolve(path_value: str, out_dir: Path) -> Path:
    p = Path(path_value)
    return p if p.is_absolute() else out_dir / p


def cmd_run(args) -> int:
    raw = load_config_file(Path(args.config))
    spec, options = parse_config(raw)
    tolerance = args.tolerance if args.tolerance is not None else options["tolerance"]
    out_dir = _resolve_out_dir(args.out)
    csv_path = _resolve(options["csv_path"], out_dir)
    meta_path = _resolve(options["meta_path"], out_dir)

    t0 = time.perf_counter()
    if isinstance(spec, TlsSweepSpec):
        rows = run_tls_sweep(spec, rtol=tolerance, workers=args.workers)
        diagnostics = {
            "scenario": Scenario.TLS.value,
            "rows": len(rows),
            "max_residual": max(r.residual for r in rows),
            "max_R": max(r.R for r in rows),
        }
    else:
        rows = run_sweep(spec, rtol=tolerance, workers=args.workers)
        diagnostics = sweep_diagnostics(rows, spec)
    wall = time.perf_counter() - t0

    write_rows_csv(rows, csv_path)
    write_metadata(meta_path, _config_echo(raw), diagnostics, wall)
    print(f"wrote {csv_path} ({len(rows)} rows) and {meta_path}")
    if args.plot:
        from .plotting import render_sweep_figure

        png = csv_path.with_suffix(".png")
        render_sweep_figure({"run": rows}, png)
        print(f"wrote {png}")
    return EXIT_OK


def _spec_as_config_echo(spec: SweepSpec) -> dict:
    """Express a preset sweep as a config mapping that ``run`` accepts."""
    cfg = spec.config
    return {
        "model": {"omega": cfg.omega, "dim": cfg.dim},
        "bath": {
            "left": {"T": spec.fixed_T, "gamma": cfg.left.gamma, "Gamma2": cfg.left.Gamma_two},
            "right": {"T": spec.T_values[0], "gamma": cfg.right.gamma, "Gamma2": cfg.right.Gamma_two},
        },
        "sweep": {
            "mode": spec.mode.value,
            "fixed_T": spec.fixed_T,
            "values": list(spec.T_values),
        },
    }


def cmd_reproduce(args) -> int:
    out_dir = _resolve_out_dir(args.out)
    tolerance = args.tolerance if args.tolerance is not None else 1e-10
    curves: dict[str, list] = {}
    for label, spec in figure_preset(args.figure):
        t0 = time.perf_counter()
        rows = run_sweep(spec, rtol=tolerance, workers=args.workers)
        curves[label] = rows
        stem = f"{args.figure}_{label.replace('=', '')}"
        csv_path = out_dir / f"{stem}.csv"
        write_rows_csv(rows, csv_path)
        print(f"wrote {csv_path}")
        write_metadata(
            out_dir / f"{stem}.meta.json",
            _spec_as_config_echo(spec),
            sweep_diagnostics(rows, spec),
            time.perf_counter() - t0,
        )
    if args.plot:
        from .plotting import render_sweep_figure

        png = out_dir / f"{args.figure}.png"
        render_sweep_figure(curves, png, title=args.figure)
        print(f"wrote {png}")
    return EXIT_OK


def _check_fixtures(tolerance: float):
    """(name, callable) pairs for the built-in invariant suite."""
    from . import checks

    return checks.built_in_checks(tolerance)


def cmd_check(args) -> int:
    tolerance = args.tolerance if args.tolerance is not None else 1e-10
    failures = 0
    for name, fn in _check_fixtures(tolerance):
        try:
            fn()
        except Exception as exc:  # report and continue: the suite is diagnostic
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_CROSSCHECK
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoflux",
        description="Steady-state heat transport through a harmonic mode "
        "with one- and two-photon thermal dissipation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV_VAR} or '.')")
        p.add_argument("--workers", type=int, default=1, help="concurrent sweep points")
        p.add_argument("--tolerance", type=float, default=None, help="steady-state residual tolerance")

    p_run = sub.add_parser("run", help="run a sweep from a config file")
    p_run.add_argument("config", help="YAML/JSON config path (or a metadata sidecar)")
    common(p_run)
    p_run.add_argument("--plot", action=argparse.BooleanOptionalAction, default=False,
                       help="also render a PNG next to the CSV")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("reproduce", help="regenerate the data behind a published figure")
    p_rep.add_argument("figure", choices=FIGURE_IDS)
    common(p_rep)
    p_rep.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                       help="render the figure PNG (default on)")
    p_rep.set_defaults(func=cmd_reproduce)

    p_chk = sub.add_parser("check", help="run the built-in invariant fixtures")
    p_chk.add_argument("--tolerance", type=float, default=None)
    p_chk.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CrossCheckFailed as exc:
        print(f"internal cross-check failure: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK


if __name__ == "__main__":
    sys.exit(main())
