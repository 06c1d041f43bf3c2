"""Temperature sweeps, scenario dispatch and tabular (CSV + JSON) output.

A sweep fixes one bath temperature and varies the other; each point is
solved forward (as configured) and reverse (temperatures swapped, couplings
staying on their side), yielding the two currents and the rectification
coefficient.  Where a closed form exists for the scenario, its prediction
is emitted alongside the numerics (``analytic_J``/``analytic_R`` columns).

Output is deterministic: the same configuration produces byte-identical
CSV (floats are written with ``repr``, the shortest round-trip form).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import linear_current, semiclassical_current, two_photon_current
from .fock import BathSpec, FockSpace, ModelConfig
from .steady import Sector, default_sector, solve_steady, steady_state
from .tls_reduction import (
    FilterMode,
    TlsHoParams,
    effective_liouvillian,
    effective_sector,
    two_bath_effective_config,
)
from .transport import fock_moments, heat_current_channels, rectification, transport_result

CSV_SCHEMA = "thermoflux.sweep.v1"
CSV_COLUMNS = (
    "T_varied",
    "J_forward",
    "J_reverse",
    "R",
    "mean_n",
    "residual",
    "analytic_J",
    "analytic_R",
)


class SweepMode(Enum):
    FIX_LEFT_VARY_RIGHT = "fix_left_vary_right"
    FIX_RIGHT_VARY_LEFT = "fix_right_vary_left"


class Scenario(Enum):
    LINEAR = "linear"              # both two-photon rates zero
    TWO_PHOTON = "two_photon"      # both one-photon rates zero
    ASYMMETRIC = "asymmetric"      # two-photon on the left bath only
    FULL = "full"                  # everything else
    TLS = "tls"                    # engineered dissipation pipeline


@dataclass(frozen=True)
class SweepSpec:
    mode: SweepMode
    fixed_T: float
    T_values: tuple[float, ...]
    config: ModelConfig            # template; temperatures overwritten per point
    sector_policy: Sector | None = None   # None: auto (even iff both gamma zero)

    def __post_init__(self):
        if not self.fixed_T > 0:
            raise ValueError(f"fixed_T must be > 0, got {self.fixed_T}")
        if len(self.T_values) == 0:
            raise ValueError("T_values must be nonempty")
        vals = np.asarray(self.T_values, dtype=float)
        if not np.all(vals > 0):
            raise ValueError("all sweep temperatures must be > 0")
        if not np.all(np.diff(vals) > 0):
            raise ValueError("sweep temperatures must be strictly increasing")

    def point_config(self, t: float) -> ModelConfig:
        if self.mode is SweepMode.FIX_LEFT_VARY_RIGHT:
            tl, tr = self.fixed_T, t
        else:
            tl, tr = t, self.fixed_T
        return replace(
            self.config,
            left=replace(self.config.left, temperature=tl),
            right=replace(self.config.right, temperature=tr),
        )


@dataclass(frozen=True)
class SweepRow:
    T_varied: float
    J_forward: float
    J_reverse: float
    R: float
    mean_n: float
    residual: float
    analytic_J: float | None = None
    analytic_R: float | None = None


def classify_scenario(config: ModelConfig) -> Scenario:
    GL, GR = config.left.Gamma_two, config.right.Gamma_two
    gL, gR = config.left.gamma, config.right.gamma
    if GL == 0.0 and GR == 0.0:
        return Scenario.LINEAR
    if gL == 0.0 and gR == 0.0:
        return Scenario.TWO_PHOTON
    if GR == 0.0 and GL > 0.0:
        return Scenario.ASYMMETRIC
    return Scenario.FULL


def _analytic_columns(config: ModelConfig, scenario: Scenario) -> tuple[float | None, float | None]:
    """Closed-form forward current and rectification where the scenario has one."""
    if scenario is Scenario.LINEAR:
        return linear_current(config), 0.0
    if scenario is Scenario.TWO_PHOTON:
        j_fwd = two_photon_current(config)
        j_rev = two_photon_current(config.with_swapped_temperatures())
        return j_fwd, rectification(j_fwd, j_rev)
    if scenario is Scenario.ASYMMETRIC:
        j_fwd = semiclassical_current(config)
        j_rev = semiclassical_current(config.with_swapped_temperatures())
        return j_fwd, rectification(j_fwd, j_rev)
    return None, None


def evaluate_point(
    config: ModelConfig,
    sector: Sector | None = None,
    rtol: float = 1e-10,
    scenario: Scenario | None = None,
) -> SweepRow:
    """Forward and reverse solve of one temperature point."""
    if scenario is None:
        scenario = classify_scenario(config)
    fwd = steady_state(config, sector=sector, rtol=rtol)
    fwd_tr = transport_result(config, fwd)
    swapped = config.with_swapped_temperatures()
    rev_tr = transport_result(swapped, steady_state(swapped, sector=sector, rtol=rtol))
    analytic_j, analytic_r = _analytic_columns(config, scenario)
    return SweepRow(
        T_varied=float("nan"),  # filled by the sweep loop
        J_forward=fwd_tr.J_right,
        J_reverse=rev_tr.J_right,
        R=rectification(fwd_tr.J_right, rev_tr.J_right),
        mean_n=fwd_tr.mean_n,
        residual=max(fwd_tr.residual, rev_tr.residual),
        analytic_J=analytic_j,
        analytic_R=analytic_r,
    )


def run_sweep(spec: SweepSpec, rtol: float = 1e-10, workers: int = 1) -> list[SweepRow]:
    """Evaluate every sweep temperature; rows come back ordered by T.

    Points are independent; with ``workers`` > 1 they are evaluated in a
    thread pool (the dense solves release the GIL inside LAPACK).
    """
    scenario = classify_scenario(spec.config)

    def job(t: float) -> SweepRow:
        row = evaluate_point(
            spec.point_config(t), sector=spec.sector_policy, rtol=rtol, scenario=scenario
        )
        return replace(row, T_varied=t)

    if workers <= 1:
        return [job(t) for t in spec.T_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, spec.T_values))


# ---------------------------------------------------------------------------
# engineered-dissipation (TLS) sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TlsSweepSpec:
    """Sweep over the bath temperature of one TLS-mediated contact."""

    mode: SweepMode
    fixed_T: float
    T_values: tuple[float, ...]
    left: TlsHoParams
    right: TlsHoParams
    dim: int
    filter_mode: FilterMode = FilterMode.NONE

    def __post_init__(self):
        if not self.fixed_T > 0:
            raise ValueError(f"fixed_T must be > 0, got {self.fixed_T}")
        vals = np.asarray(self.T_values, dtype=float)
        if vals.size == 0 or not np.all(vals > 0) or not np.all(np.diff(vals) > 0):
            raise ValueError("sweep temperatures must be nonempty, positive, strictly increasing")

    def point_params(self, t: float):
        if self.mode is SweepMode.FIX_LEFT_VARY_RIGHT:
            return self.left.with_temperature(self.fixed_T), self.right.with_temperature(t)
        return self.left.with_temperature(t), self.right.with_temperature(self.fixed_T)


def _evaluate_tls_point(spec: TlsSweepSpec, t: float, rtol: float) -> SweepRow:
    left, right = spec.point_params(t)
    space = FockSpace(spec.dim)

    def j_right(lp, rp):
        ec = two_bath_effective_config(lp, rp, space, spec.filter_mode)
        res = solve_steady(effective_liouvillian(ec), sector=effective_sector(ec), rtol=rtol)
        j = heat_current_channels(res.rho, ec.right, ec.omega)
        return j, res

    j_fwd, fwd = j_right(left, right)
    j_rev, rev = j_right(
        left.with_temperature(right.temperature),
        right.with_temperature(left.temperature),
    )
    mean_n, _, _ = fock_moments(np.diag(fwd.rho).real)
    return SweepRow(
        T_varied=t,
        J_forward=j_fwd,
        J_reverse=j_rev,
        R=rectification(j_fwd, j_rev),
        mean_n=mean_n,
        residual=max(fwd.residual, rev.residual),
    )


def run_tls_sweep(spec: TlsSweepSpec, rtol: float = 1e-10, workers: int = 1) -> list[SweepRow]:
    """Engineered-dissipation analogue of :func:`run_sweep`."""
    if workers <= 1:
        return [_evaluate_tls_point(spec, t, rtol) for t in spec.T_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: _evaluate_tls_point(spec, t, rtol), spec.T_values))


# ---------------------------------------------------------------------------
# figure reproduction presets
# ---------------------------------------------------------------------------

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5")

# Captions pin the fixed temperatures and rates; the visible axis ranges are
# approximated by a geometric grid over [0.25, 4] (64 points), dense enough
# to plot from.  Pure two-photon sweeps run at a deep cutoff (sector solves
# stay on the small population block, so this is cheap) to keep the
# closed-form comparison column converged across the hot end of the grid.
_GRID = tuple(float(t) for t in np.geomspace(0.25, 4.0, 64))


def _bath_config(omega, dim, gL, GL, gR, GR):
    # placeholder temperatures; the sweep overwrites them per point
    return ModelConfig(
        omega=omega,
        dim=dim,
        left=BathSpec(temperature=1.0, gamma=gL, Gamma_two=GL),
        right=BathSpec(temperature=1.0, gamma=gR, Gamma_two=GR),
    )


def figure_preset(figure: str) -> list[tuple[str, SweepSpec]]:
    """Labelled sweeps reproducing the data behind one published figure."""
    if figure == "fig2":
        # pure two-photon: strong left contact, weak right contact
        return [
            (
                f"GammaR={GR}",
                SweepSpec(
                    mode=SweepMode.FIX_LEFT_VARY_RIGHT,
                    fixed_T=2.0,
                    T_values=_GRID,
                    config=_bath_config(1.0, 120, 0.0, 0.1, 0.0, GR),
                ),
            )
            for GR in (0.001, 0.01)
        ]
    if figure == "fig3":
        # one-sided two-photon coupling, cold fixed left bath
        return [
            (
                "GammaL=0.02",
                SweepSpec(
                    mode=SweepMode.FIX_LEFT_VARY_RIGHT,
                    fixed_T=0.25,
                    T_values=_GRID,
                    config=_bath_config(1.0, 50, 0.2, 0.02, 0.2, 0.0),
                ),
            )
        ]
    if figure == "fig4":
        # one-sided two-photon coupling, weak vs strong
        return [
            (
                f"GammaL={GL}",
                SweepSpec(
                    mode=SweepMode.FIX_LEFT_VARY_RIGHT,
                    fixed_T=2.0,
                    T_values=_GRID,
                    config=_bath_config(1.0, 50, 0.5, GL, 0.5, 0.0),
                ),
            )
            for GL in (0.001, 0.1)
        ]
    if figure == "fig5":
        # all four channels active
        return [
            (
                f"GammaR={GR}",
                SweepSpec(
                    mode=SweepMode.FIX_LEFT_VARY_RIGHT,
                    fixed_T=2.0,
                    T_values=_GRID,
                    config=_bath_config(1.0, 50, 0.2, 0.1, 0.2, GR),
                ),
            )
            for GR in (0.001, 0.01)
        ]
    raise ValueError(f"unknown figure id {figure!r}; expected one of {FIGURE_IDS}")


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def _format_cell(value: float | None) -> str:
    if value is None:
        return ""
    return repr(float(value))


def write_rows_csv(rows: list[SweepRow], path: Path) -> None:
    """UTF-8 comma-separated table; '.' decimal; schema comment + header row."""
    lines = [f"# schema={CSV_SCHEMA}", ",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(getattr(row, col)) for col in CSV_COLUMNS))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_rows_csv(path: Path) -> list[SweepRow]:
    rows = []
    lines = path.read_text(encoding="utf-8").splitlines()
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    header = body[0].split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    for ln in body[1:]:
        cells = ln.split(",")
        kwargs = {
            col: (None if cell == "" else float(cell))
            for col, cell in zip(CSV_COLUMNS, cells)
        }
        rows.append(SweepRow(**kwargs))
    return rows


def write_metadata(
    path: Path,
    config_echo: dict,
    diagnostics: dict,
    wall_time_s: float,
) -> None:
    """JSON sidecar: config echo, solver diagnostics, code version, wall time."""
    payload = {
        "schema": CSV_SCHEMA,
        "code_version": __version__,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "wall_time_s": wall_time_s,
        "config": config_echo,
        "diagnostics": diagnostics,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def sweep_diagnostics(rows: list[SweepRow], spec: SweepSpec) -> dict:
    sector = spec.sector_policy or default_sector(spec.config)
    return {
        "scenario": classify_scenario(spec.config).value,
        "sector": sector.value,
        "rows": len(rows),
        "max_residual": max(row.residual for row in rows),
        "max_R": max(row.R for row in rows),
    }
