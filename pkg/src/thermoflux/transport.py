"""Heat currents, energy balance and the rectification coefficient.

Sign convention: a current is positive when energy flows from the bath
into the oscillator.  At steady state the two bath currents balance,
J_L + J_R = 0, and the net current is reported as J_R (inflow from the
right bath).

Every current is computed twice and cross-checked internally:

(a) by applying the bath's dissipator as a superoperator and tracing
    against the Hamiltonian, and
(b) from the photon-number moments: omega*(up1*(<n>+1) - down1*<n>) for
    the one-photon channel and 2*omega*(up2*<(n+1)(n+2)> - down2*<n(n-1)>)
    for the two-photon channel, with explicit boundary terms for the
    levels of the truncated space that have no upward jump.

The boundary terms make (b) an identity on the truncated space rather
than an approximation, so any disagreement between (a) and (b) signals a
real bug (most likely a vectorization-convention slip), not truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, ModelConfig, number_operator
from .lindblad import ChannelRates, apply_channel_dissipator
from .steady import Sector, SteadyStateResult, steady_state

# Absolute floor distinguishing "a current of zero" from solver noise in
# relative comparisons; equilibrium currents sit many orders below it.
CURRENT_FLOOR = 1e-12

_CROSS_CHECK_RTOL = 1e-9
_BALANCE_RTOL = 1e-9


class CrossCheckFailed(Exception):
    """The superoperator and moment routes disagree on a heat current."""


@dataclass(frozen=True)
class TransportResult:
    J_left: float
    J_right: float
    J_net: float                 # = J_right by convention
    balance_residual: float      # |J_left + J_right|
    mean_n: float
    n_n_minus_1: float           # <n(n-1)>
    n1_n2: float                 # <(n+1)(n+2)>
    residual: float              # steady-state solver residual
    sector: Sector


@dataclass(frozen=True)
class RectificationResult:
    J_forward: float             # J_R with temperatures as configured
    J_reverse: float             # J_R with the two temperatures swapped
    R: float
    no_transport: bool = False   # both currents below the floor: R defined as 0


def fock_moments(populations: np.ndarray) -> tuple[float, float, float]:
    """(<n>, <n(n-1)>, <(n+1)(n+2)>) of a population vector."""
    ns = np.arange(len(populations), dtype=float)
    mean_n = float(ns @ populations)
    emission = float((ns * (ns - 1.0)) @ populations)
    absorption = float(((ns + 1.0) * (ns + 2.0)) @ populations)
    return mean_n, emission, absorption


def population_heat_current(populations: np.ndarray, rates: ChannelRates, omega: float) -> float:
    """Moment-route current of one contact, exact on the truncated space.

    The top one (two) level(s) of the truncated ladder have no upward
    one-photon (two-photon) jump, so their contribution to the absorption
    moments is removed explicitly.
    """
    dim = len(populations)
    mean_n, emission, absorption = fock_moments(populations)
    # <n+1> restricted to levels that still have an upward one-photon jump
    up1_weight = mean_n + 1.0 - dim * float(populations[dim - 1])
    # <(n+1)(n+2)> restricted to levels with an upward two-photon jump
    up2_weight = absorption - (dim - 1.0) * dim * float(populations[dim - 2]) \
        - dim * (dim + 1.0) * float(populations[dim - 1])
    j1 = omega * (rates.up1 * up1_weight - rates.down1 * mean_n)
    j2 = 2.0 * omega * (rates.up2 * up2_weight - rates.down2 * emission)
    # dephasing commutes with the Hamiltonian: no energy exchange
    return j1 + j2


def heat_current_channels(
    rho: np.ndarray,
    rates: ChannelRates,
    omega: float,
    check: bool = True,
) -> float:
    """Heat current of one contact given explicit channel rates.

    Route (a), returned: apply the contact's dissipator to rho and trace
    against the Hamiltonian.  Route (b): the moment formula.  Disagreement
    beyond roundoff raises :class:`CrossCheckFailed`.
    """
    dim = rho.shape[0]
    drho = apply_channel_dissipator(rho, FockSpace(dim), rates)
    H = omega * number_operator(FockSpace(dim))
    j_super = float(np.trace(H @ drho).real)
    if check:
        j_moments = population_heat_current(np.diag(rho).real, rates, omega)
        tol = _CROSS_CHECK_RTOL * max(abs(j_super), abs(j_moments)) + CURRENT_FLOOR
        if abs(j_super - j_moments) > tol:
            raise CrossCheckFailed(
                f"dissipator route gives {j_super:.12e}, moment route "
                f"{j_moments:.12e}; difference {abs(j_super - j_moments):.3e} "
                f"exceeds {tol:.3e}"
            )
    return j_super


def heat_current(rho_ss: np.ndarray, config: ModelConfig, side: str, check: bool = True) -> float:
    """Steady-state heat current from bath ``side`` ('L' or 'R') into the system."""
    rates = ChannelRates.from_bath(config.bath(side), config.omega)
    return heat_current_channels(rho_ss, rates, config.omega, check=check)


def transport_result(config: ModelConfig, solution: SteadyStateResult) -> TransportResult:
    """Bath-resolved currents, balance residual and steady-state moments."""
    j_left = heat_current(solution.rho, config, "L")
    j_right = heat_current(solution.rho, config, "R")
    balance = abs(j_left + j_right)
    if balance > _BALANCE_RTOL * max(abs(j_left), abs(j_right)) + CURRENT_FLOOR:
        raise CrossCheckFailed(
            f"energy balance violated: J_L + J_R = {j_left + j_right:.3e} "
            f"with |J_L| = {abs(j_left):.3e}, |J_R| = {abs(j_right):.3e}"
        )
    mean_n, emission, absorption = fock_moments(np.diag(solution.rho).real)
    return TransportResult(
        J_left=j_left,
        J_right=j_right,
        J_net=j_right,
        balance_residual=balance,
        mean_n=mean_n,
        n_n_minus_1=emission,
        n1_n2=absorption,
        residual=solution.residual,
        sector=solution.sector,
    )


def rectification(J_forward: float, J_reverse: float, floor: float = CURRENT_FLOOR) -> float:
    """|J_f + J_r| / max(|J_f|, |J_r|), defined as 0 when both currents vanish."""
    scale = max(abs(J_forward), abs(J_reverse))
    if scale <= floor:
        return 0.0
    r = abs(J_forward + J_reverse) / scale
    # roundoff can push a perfect diode a hair past 1
    return min(r, 1.0)


def forward_reverse(
    config: ModelConfig,
    sector: Sector | None = None,
    rtol: float = 1e-10,
) -> RectificationResult:
    """Solve as configured and with temperatures swapped; report both J_R and R.

    Coupling rates stay attached to their geometric side; only the two
    temperatures are exchanged.
    """
    fwd = steady_state(config, sector=sector, rtol=rtol)
    rev = steady_state(config.with_swapped_temperatures(), sector=sector, rtol=rtol)
    j_fwd = transport_result(config, fwd).J_right
    j_rev = transport_result(config.with_swapped_temperatures(), rev).J_right
    scale = max(abs(j_fwd), abs(j_rev))
    return RectificationResult(
        J_forward=j_fwd,
        J_reverse=j_rev,
        R=rectification(j_fwd, j_rev),
        no_transport=scale <= CURRENT_FLOOR,
    )
