"""Engineered one- and two-photon dissipation via an auxiliary two-level system.

A two-level system (TLS) of frequency ``omega_o``, coupled to a thermal
bath with flat spectral density, is attached to the oscillator through an
energy-field interaction g*sigma_z*(a + a^dag).  Displacing the oscillator
conditionally on the TLS state (polaron frame, small parameter
alpha = g/omega_a) and keeping terms through second order in alpha turns
the TLS-bath contact into sideband jump processes on the joint system:
carrier flips at omega_o, one-quantum sidebands at omega_o -+ omega_a and
two-quantum sidebands at omega_o -+ 2*omega_a.

Tracing out the TLS (weights: its thermal excited/ground populations)
leaves the oscillator with effective single-photon, two-photon and
number-dephasing dissipators whose rates are assembled here.  Feeding the
two-sided rate sets into the transport machinery reproduces the
heat-rectification pipeline with engineered couplings.

Closure note: the TLS populations entering the rates are taken from the
bare TLS thermal steady state, <sigma_z> = -1/(2 n_bar(omega_o) + 1).
This is the leading-order result for alpha << 1, where the carrier terms
thermalize the TLS long before the alpha^2 sidebands matter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .fock import FockSpace, annihilation, number_operator, thermal_occupation
from .lindblad import ChannelRates, channel_dissipator, dissipator, hamiltonian_superoperator
from .steady import Sector, SteadyStateResult, solve_steady
from .transport import CURRENT_FLOOR, RectificationResult, heat_current_channels, rectification

# |alpha| beyond this makes the dropped O(alpha^3) operator terms dubious.
ALPHA_SOFT_LIMIT = 0.3

# Joint TLS (x) oscillator solves scale as (2*dim)^6; keep them desktop-sized.
DEFAULT_COMPOSITE_DIM_CAP = 30


class ZeroFrequency(Exception):
    """Bath response is undefined at zero frequency."""


class ResonantFrequencies(Exception):
    """A sideband frequency vanished; the rate formulas break down."""


class NegativeRate(Exception):
    """An effective rate evaluated negative: invalid regime for the reduction."""


class InvertedRates(Exception):
    """Effective absorption exceeds emission: no thermal mapping exists."""


class DimensionTooLarge(Exception):
    """Requested joint solve exceeds the configured size cap."""


class FilterMode(Enum):
    """Idealized spectral filtering: binary channel selection."""

    NONE = "none"
    KEEP_TWO_PHOTON_ONLY = "two_photon_only"
    KEEP_ONE_PHOTON_ONLY = "one_photon_only"


@dataclass(frozen=True)
class TlsHoParams:
    """One TLS-mediated bath contact.

    ``omega_o``: TLS frequency, ``omega_a``: oscillator frequency,
    ``g``: energy-field coupling, ``kappa``: TLS-bath coupling strength,
    ``temperature``: bath temperature.  All in units hbar = k_B = 1.
    """

    omega_o: float
    omega_a: float
    g: float
    kappa: float
    temperature: float

    def __post_init__(self):
        if not self.omega_o > 0:
            raise ValueError(f"omega_o must be > 0, got {self.omega_o}")
        if not self.omega_a > 0:
            raise ValueError(f"omega_a must be > 0, got {self.omega_a}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if abs(self.alpha) > ALPHA_SOFT_LIMIT:
            warnings.warn(
                f"alpha = g/omega_a = {self.alpha:.3f} exceeds {ALPHA_SOFT_LIMIT}; "
                "the second-order operator expansion is unreliable here",
                stacklevel=2,
            )

    @property
    def alpha(self) -> float:
        return self.g / self.omega_a

    def with_temperature(self, temperature: float) -> "TlsHoParams":
        return replace(self, temperature=temperature)


@dataclass(frozen=True)
class EffectiveRates:
    """Oscillator rates left after tracing out the TLS."""

    gamma_minus: float   # D[a]
    gamma_plus: float    # D[a^dag]
    Gamma_minus: float   # D[a^2]
    Gamma_plus: float    # D[a^dag^2]
    gamma_d: float       # D[a^dag a]


def bath_response(omega_arg: float, kappa: float, temperature: float) -> float:
    """Flat-spectrum response: kappa*(n_bar+1) for emission (omega_arg > 0),
    kappa*n_bar for absorption (omega_arg < 0)."""
    if omega_arg == 0.0:
        raise ZeroFrequency("bath response called at zero frequency")
    n = thermal_occupation(abs(omega_arg), temperature)
    if omega_arg > 0:
        return kappa * (n + 1.0)
    return kappa * n


def tls_polarization(params: TlsHoParams) -> float:
    """Thermal TLS steady-state <sigma_z> = -1/(2 n_bar(omega_o) + 1)."""
    n = thermal_occupation(params.omega_o, params.temperature)
    return -1.0 / (2.0 * n + 1.0)


def _tls_populations(params: TlsHoParams) -> tuple[float, float]:
    """(excited, ground) thermal populations of the TLS."""
    sz = tls_polarization(params)
    return 0.5 * (1.0 + sz), 0.5 * (1.0 - sz)


def effective_rates(params: TlsHoParams) -> EffectiveRates:
    """Effective oscillator rates from the TLS-mediated contact.

    Each joint sideband dissipator D[sigma_-+ a^(dag)q] contributes to the
    corresponding oscillator channel weighted by the thermal population of
    the TLS state it acts on (excited for sigma_-, ground for sigma_+):

        gamma_minus = alpha^2 [G(omega_o + omega_a) p_e + G(-(omega_o - omega_a)) p_g]
        gamma_plus  = alpha^2 [G(omega_o - omega_a) p_e + G(-(omega_o + omega_a)) p_g]
        Gamma_-+    = alpha^3 [same pattern at omega_o -+ 2 omega_a]
        gamma_d     = 2 alpha^3 [G(omega_o) p_e + G(-omega_o) p_g]

    One-photon rates scale as alpha^2, two-photon and dephasing rates as
    alpha^3.
    """
    wo, wa = params.omega_o, params.omega_a
    for shift in (wa, -wa, 2.0 * wa, -2.0 * wa):
        if wo + shift == 0.0:
            raise ResonantFrequencies(
                f"omega_o {wo} resonant with sideband shift {shift}; rates diverge"
            )
    alpha = params.alpha
    pe, pg = _tls_populations(params)

    def G(x: float) -> float:
        return bath_response(x, params.kappa, params.temperature)

    a2, a3 = alpha**2, abs(alpha) ** 3
    rates = EffectiveRates(
        gamma_minus=a2 * (G(wo + wa) * pe + G(-(wo - wa)) * pg),
        gamma_plus=a2 * (G(wo - wa) * pe + G(-(wo + wa)) * pg),
        Gamma_minus=a3 * (G(wo + 2 * wa) * pe + G(-(wo - 2 * wa)) * pg),
        Gamma_plus=a3 * (G(wo - 2 * wa) * pe + G(-(wo + 2 * wa)) * pg),
        gamma_d=2.0 * a3 * (G(wo) * pe + G(-wo) * pg),
    )
    for name in ("gamma_minus", "gamma_plus", "Gamma_minus", "Gamma_plus", "gamma_d"):
        if getattr(rates, name) < -1e-12:
            raise NegativeRate(f"effective rate {name} = {getattr(rates, name):.3e} < 0")
    return rates


def filtered_rates(params: TlsHoParams, mode: FilterMode = FilterMode.NONE) -> EffectiveRates:
    """Apply ideal spectral filtering by zeroing the suppressed channels."""
    rates = effective_rates(params)
    if mode is FilterMode.NONE:
        return rates
    if mode is FilterMode.KEEP_TWO_PHOTON_ONLY:
        return EffectiveRates(0.0, 0.0, rates.Gamma_minus, rates.Gamma_plus, 0.0)
    return EffectiveRates(rates.gamma_minus, rates.gamma_plus, 0.0, 0.0, rates.gamma_d)


def rates_to_channels(rates: EffectiveRates, include_dephasing: bool = True) -> ChannelRates:
    """Map effective rates onto the per-channel normal form."""
    return ChannelRates(
        down1=max(rates.gamma_minus, 0.0),
        up1=max(rates.gamma_plus, 0.0),
        down2=max(rates.Gamma_minus, 0.0),
        up2=max(rates.Gamma_plus, 0.0),
        dephasing=max(rates.gamma_d, 0.0) if include_dephasing else 0.0,
    )


def reduced_ho_liouvillian(
    params: TlsHoParams,
    space: FockSpace,
    include_dephasing: bool = True,
) -> np.ndarray:
    """Oscillator-only generator with the five effective dissipators.

    The dephasing term is diagonal in the Fock basis, so steady-state
    populations and heat-relevant moments are identical with it on or off.
    """
    return channel_dissipator(space, rates_to_channels(effective_rates(params), include_dephasing))


def composite_liouvillian(
    params: TlsHoParams,
    space: FockSpace,
    upper_band_alpha2: bool = False,
    dim_cap: int = DEFAULT_COMPOSITE_DIM_CAP,
) -> np.ndarray:
    """Joint TLS (x) oscillator generator in the polaron interaction frame.

    Jump operators (TLS part first in the tensor product, basis |e>, |g>):
    carrier sigma_-+ at G(+-omega_o), sigma_-+ n at alpha^3 G(+-omega_o),
    lower sidebands sigma_- a^dag^q / sigma_+ a^q at alpha^(q+1)
    G(+-(omega_o - q omega_a)), upper sidebands sigma_- a^q /
    sigma_+ a^dag^q at alpha^(q+1) G(+-(omega_o + q omega_a)) for q = 1, 2.

    ``upper_band_alpha2`` fixes the upper-sideband weight at alpha^2 for
    both q instead of alpha^(q+1); the default scaling is the one
    consistent with the operator expansion and is what the reduced rates
    assume.
    """
    if space.dim > dim_cap:
        raise DimensionTooLarge(
            f"joint solve at dim {space.dim} exceeds cap {dim_cap}; raise dim_cap knowingly"
        )
    wo, wa = params.omega_o, params.omega_a
    for shift in (wa, -wa, 2.0 * wa, -2.0 * wa):
        if wo + shift == 0.0:
            raise ResonantFrequencies(f"omega_o {wo} resonant with sideband shift {shift}")
    alpha = params.alpha

    def G(x: float) -> float:
        return bath_response(x, params.kappa, params.temperature)

    sigma_minus = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
    sigma_plus = sigma_minus.conj().T
    a = annihilation(space)
    ad = a.conj().T
    eye_osc = np.eye(space.dim, dtype=complex)
    n_op = ad @ a

    def joint(ts: np.ndarray, osc: np.ndarray) -> np.ndarray:
        return np.kron(ts, osc)

    dim2 = (2 * space.dim) ** 2
    L = np.zeros((dim2, dim2), dtype=complex)
    # carrier: TLS thermalization plus the alpha^3 number-conditioned flips
    L += dissipator(joint(sigma_minus, eye_osc), G(wo))
    L += dissipator(joint(sigma_plus, eye_osc), G(-wo))
    a3 = abs(alpha) ** 3
    if a3 > 0:
        L += a3 * dissipator(joint(sigma_minus, n_op), G(wo))
        L += a3 * dissipator(joint(sigma_plus, n_op), G(-wo))
    # sidebands
    for q in (1, 2):
        weight_low = abs(alpha) ** (q + 1)
        weight_high = alpha**2 if upper_band_alpha2 else weight_low
        if weight_low == 0.0 and weight_high == 0.0:
            continue
        aq = np.linalg.matrix_power(a, q)
        adq = np.linalg.matrix_power(ad, q)
        w_low = wo - q * wa    # TLS decays, oscillator gains q quanta
        w_high = wo + q * wa   # TLS decays, oscillator loses q quanta
        L += weight_low * G(w_low) * dissipator(joint(sigma_minus, adq), 1.0)
        L += weight_low * G(-w_low) * dissipator(joint(sigma_plus, aq), 1.0)
        L += weight_high * G(w_high) * dissipator(joint(sigma_minus, aq), 1.0)
        L += weight_high * G(-w_high) * dissipator(joint(sigma_plus, adq), 1.0)
    return L


def trace_out_tls(rho_joint: np.ndarray) -> np.ndarray:
    """Partial trace over the TLS factor of a (2*dim) x (2*dim) joint state."""
    full = rho_joint.shape[0]
    if full % 2 != 0:
        raise ValueError(f"joint dimension {full} is not 2 * dim")
    dim = full // 2
    return rho_joint[:dim, :dim] + rho_joint[dim:, dim:]


def composite_steady_state(
    params: TlsHoParams,
    space: FockSpace,
    upper_band_alpha2: bool = False,
    dim_cap: int = DEFAULT_COMPOSITE_DIM_CAP,
    rtol: float = 1e-10,
) -> SteadyStateResult:
    """Steady state of the joint TLS (x) oscillator generator."""
    L = composite_liouvillian(params, space, upper_band_alpha2=upper_band_alpha2, dim_cap=dim_cap)
    return solve_steady(L, sector=Sector.FULL, rtol=rtol)


@dataclass(frozen=True)
class EffectiveBathConfig:
    """Two TLS-mediated contacts mapped onto the transport machinery.

    ``n_eff``/``m_eff`` are the occupations implied by the rate ratios,
    gamma_plus/(gamma_minus - gamma_plus) and the two-photon analogue;
    NaN when the corresponding channel is switched off.
    """

    omega: float
    dim: int
    left: ChannelRates
    right: ChannelRates
    n_eff_left: float
    m_eff_left: float
    n_eff_right: float
    m_eff_right: float


def _implied_occupation(down: float, up: float) -> float:
    if down == 0.0 and up == 0.0:
        return float("nan")
    if up >= down:
        return float("inf")
    return up / (down - up)


def map_rates_to_bath_slots(
    rates: EffectiveRates,
    name: str = "contact",
    include_dephasing: bool = True,
) -> tuple[ChannelRates, float, float]:
    """One contact's (channel rates, implied n, implied m).

    Identifies gamma_minus with gamma*(n+1), gamma_plus with gamma*n and
    likewise for the two-photon pair.  Raises :class:`InvertedRates` when
    an active one-photon channel has absorption >= emission (population
    inversion: no thermal bath reproduces it).
    """
    if (rates.gamma_minus > 0 or rates.gamma_plus > 0) and rates.gamma_plus >= rates.gamma_minus:
        raise InvertedRates(
            f"{name}: gamma_plus {rates.gamma_plus:.3e} >= "
            f"gamma_minus {rates.gamma_minus:.3e}"
        )
    return (
        rates_to_channels(rates, include_dephasing),
        _implied_occupation(rates.gamma_minus, rates.gamma_plus),
        _implied_occupation(rates.Gamma_minus, rates.Gamma_plus),
    )


def two_bath_effective_config(
    left: TlsHoParams,
    right: TlsHoParams,
    space: FockSpace,
    filter_mode: FilterMode = FilterMode.NONE,
    include_dephasing: bool = True,
) -> EffectiveBathConfig:
    """Bridge two engineered contacts into the standard two-bath rate slots."""
    if left.omega_a != right.omega_a:
        raise ValueError(
            f"both contacts must share the oscillator frequency; "
            f"got {left.omega_a} and {right.omega_a}"
        )
    sides = {}
    for name, params in (("left", left), ("right", right)):
        sides[name] = map_rates_to_bath_slots(
            filtered_rates(params, filter_mode), name, include_dephasing
        )
    return EffectiveBathConfig(
        omega=left.omega_a,
        dim=space.dim,
        left=sides["left"][0],
        right=sides["right"][0],
        n_eff_left=sides["left"][1],
        m_eff_left=sides["left"][2],
        n_eff_right=sides["right"][1],
        m_eff_right=sides["right"][2],
    )


def effective_liouvillian(config: EffectiveBathConfig) -> np.ndarray:
    """Oscillator generator for an engineered two-bath configuration."""
    space = FockSpace(config.dim)
    H = config.omega * number_operator(space)
    return (
        hamiltonian_superoperator(H)
        + channel_dissipator(space, config.left)
        + channel_dissipator(space, config.right)
    )


def effective_sector(config: EffectiveBathConfig) -> Sector:
    """Even parity when the engineered one-photon channels are all zero."""
    one_photon = (
        config.left.down1 + config.left.up1 + config.right.down1 + config.right.up1
    )
    return Sector.EVEN_PARITY if one_photon == 0.0 else Sector.FULL


def effective_heat_current(
    config: EffectiveBathConfig,
    side: str,
    sector: Sector | None = None,
    rtol: float = 1e-10,
) -> float:
    """Steady-state current from one engineered contact."""
    if sector is None:
        sector = effective_sector(config)
    result = solve_steady(effective_liouvillian(config), sector=sector, rtol=rtol)
    rates = config.left if side == "L" else config.right
    return heat_current_channels(result.rho, rates, config.omega)


def tls_forward_reverse(
    left: TlsHoParams,
    right: TlsHoParams,
    space: FockSpace,
    filter_mode: FilterMode = FilterMode.NONE,
    rtol: float = 1e-10,
) -> RectificationResult:
    """Forward/reverse transport through the engineered contacts.

    Reverse means the two bath temperatures are exchanged; the contact
    hardware (omega_o, g, kappa) stays on its side, so the effective
    rates are re-derived at the swapped temperatures.
    """
    fwd = two_bath_effective_config(left, right, space, filter_mode)
    rev = two_bath_effective_config(
        left.with_temperature(right.temperature),
        right.with_temperature(left.temperature),
        space,
        filter_mode,
    )
    j_fwd = effective_heat_current(fwd, "R", rtol=rtol)
    j_rev = effective_heat_current(rev, "R", rtol=rtol)
    return RectificationResult(
        J_forward=j_fwd,
        J_reverse=j_rev,
        R=rectification(j_fwd, j_rev),
        no_transport=max(abs(j_fwd), abs(j_rev)) <= CURRENT_FLOOR,
    )
