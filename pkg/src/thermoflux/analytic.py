"""Closed-form baselines used as oracles against the numerical solvers.

Three regimes admit closed forms:

* purely linear coupling (both two-photon rates zero): exact current and
  occupation;
* purely two-photon coupling (both one-photon rates zero): the even-parity
  steady state is geometric with a constant population ratio fixed by
  detailed balance, giving exact moments and an exact current;
* one-sided two-photon coupling on top of linear contacts: a semi-classical
  moment factorization closes the hierarchy into a quadratic for <n>,
  approximate by construction, plus its first-order (weak two-photon)
  expansion.

The semi-classical quadratic and its expansion are implemented exactly in
the conventional printed form (coefficients A = -2*Gamma_L,
B = gamma_L + gamma_R + 8*Gamma_L*m_L, C = -(gamma_L*n_L + gamma_R*n_R +
4*Gamma_L*m_L)); the two stay consistent with each other to second order
in Gamma_L, which the tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fock import ModelConfig, thermal_occupation


class NonLinearConfig(Exception):
    """Closed form requires both two-photon rates to vanish."""


class NoCoupling(Exception):
    """No dissipation channel is active in the requested regime."""


class NoPositiveRoot(Exception):
    """The semi-classical quadratic has no physical (non-negative) root."""


@dataclass(frozen=True)
class TwoPhotonMoments:
    """Moments of the geometric even-parity steady state with ratio r."""

    r: float
    mean_n: float
    n2: float                # <n^2>
    n_n_minus_1: float       # <n(n-1)>
    n1_n2: float             # <(n+1)(n+2)>


@dataclass(frozen=True)
class SemiClassicalCoefficients:
    """Quadratic A n^2 + B n + C = 0 and its physical root."""

    A: float
    B: float
    C: float
    root: float


def _occupations(config: ModelConfig):
    nL = thermal_occupation(config.omega, config.left.temperature)
    nR = thermal_occupation(config.omega, config.right.temperature)
    mL = thermal_occupation(2.0 * config.omega, config.left.temperature)
    mR = thermal_occupation(2.0 * config.omega, config.right.temperature)
    return nL, nR, mL, mR


def linear_occupation(config: ModelConfig) -> float:
    """Steady <n> for purely linear coupling: coupling-weighted mean of n_bar."""
    if config.left.Gamma_two != 0.0 or config.right.Gamma_two != 0.0:
        raise NonLinearConfig("linear occupation requires Gamma_two = 0 on both baths")
    gL, gR = config.left.gamma, config.right.gamma
    if gL + gR <= 0:
        raise NoCoupling("both one-photon rates vanish")
    nL, nR, _, _ = _occupations(config)
    return (gL * nL + gR * nR) / (gL + gR)


def linear_current(config: ModelConfig) -> float:
    """Exact right-bath current for purely linear coupling.

    Antisymmetric under temperature exchange, hence zero rectification.
    """
    if config.left.Gamma_two != 0.0 or config.right.Gamma_two != 0.0:
        raise NonLinearConfig("linear current requires Gamma_two = 0 on both baths")
    gL, gR = config.left.gamma, config.right.gamma
    if gL + gR <= 0:
        raise NoCoupling("both one-photon rates vanish")
    nL, nR, _, _ = _occupations(config)
    return config.omega * gL * gR / (gL + gR) * (nR - nL)


def two_photon_ratio(config: ModelConfig) -> float:
    """Detailed-balance population ratio r of the pure two-photon steady state.

    r = sum_a Gamma_a m_a / sum_a Gamma_a (m_a + 1); successive even-parity
    populations satisfy q_{k+1} = r q_k.
    """
    if config.left.gamma != 0.0 or config.right.gamma != 0.0:
        raise NonLinearConfig("two-photon ratio requires gamma = 0 on both baths")
    GL, GR = config.left.Gamma_two, config.right.Gamma_two
    if GL + GR <= 0:
        raise NoCoupling("both two-photon rates vanish")
    _, _, mL, mR = _occupations(config)
    up = GL * mL + GR * mR
    down = GL * (mL + 1.0) + GR * (mR + 1.0)
    return up / down


def two_photon_moments(r: float) -> TwoPhotonMoments:
    """Moments of the geometric distribution q_k = (1-r) r^k over even levels."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"ratio must satisfy 0 <= r < 1, got {r}")
    one = 1.0 - r
    mean_n = 2.0 * r / one
    n2 = 4.0 * r * (1.0 + r) / one**2
    emission = 2.0 * r * (1.0 + 3.0 * r) / one**2
    absorption = 2.0 * (1.0 + 3.0 * r) / one**2
    return TwoPhotonMoments(r=r, mean_n=mean_n, n2=n2, n_n_minus_1=emission, n1_n2=absorption)


def two_photon_current(config: ModelConfig) -> float:
    """Exact right-bath current for purely two-photon coupling.

    Follows from the geometric steady state:
    4 w G_L G_R / (G_L + G_R)^2 * [G_L(4 m_L + 1) + G_R(4 m_R + 1)] * (m_R - m_L).
    Antisymmetric under temperature exchange only when G_L = G_R.
    """
    if config.left.gamma != 0.0 or config.right.gamma != 0.0:
        raise NonLinearConfig("two-photon current requires gamma = 0 on both baths")
    GL, GR = config.left.Gamma_two, config.right.Gamma_two
    if GL + GR <= 0:
        raise NoCoupling("both two-photon rates vanish")
    _, _, mL, mR = _occupations(config)
    return (
        4.0 * config.omega * GL * GR / (GL + GR) ** 2
        * (GL * (4.0 * mL + 1.0) + GR * (4.0 * mR + 1.0))
        * (mR - mL)
    )


def _require_one_sided(config: ModelConfig) -> None:
    if config.right.Gamma_two != 0.0:
        raise NonLinearConfig("semi-classical closure assumes Gamma_two = 0 on the right bath")


def semiclassical_occupation(config: ModelConfig) -> SemiClassicalCoefficients:
    """Closure of the moment hierarchy for left-sided two-photon coupling.

    Factorizing <n(n-1)> ~ <n>^2 - <n> and <(n+1)(n+2)> ~ <n>^2 + 3<n> + 2
    closes the occupation dynamics into A n^2 + B n + C = 0.  The '+'
    branch of the quadratic formula (with A < 0) is the physical root: it
    is non-negative and tends to the linear occupation as Gamma_L -> 0.
    """
    _require_one_sided(config)
    GL = config.left.Gamma_two
    gL, gR = config.left.gamma, config.right.gamma
    if GL <= 0:
        raise NoCoupling("semi-classical closure needs Gamma_two > 0 on the left bath")
    if gL + gR <= 0:
        raise NoCoupling("semi-classical closure needs a one-photon channel")
    nL, nR, mL, _ = _occupations(config)
    A = -2.0 * GL
    B = gL + gR + 8.0 * GL * mL
    C = -(gL * nL + gR * nR + 4.0 * GL * mL)
    disc = B * B - 4.0 * A * C
    if disc < 0:
        raise NoPositiveRoot(f"negative discriminant {disc}")
    # algebraically (-B + sqrt(disc)) / (2A); this form avoids the
    # catastrophic cancellation of that expression as Gamma_L -> 0 (B > 0)
    root = -2.0 * C / (B + math.sqrt(disc))
    if root < 0:
        raise NoPositiveRoot(f"quadratic root {root} is negative")
    return SemiClassicalCoefficients(A=A, B=B, C=C, root=root)


def semiclassical_current(config: ModelConfig) -> float:
    """Right-bath current with <n> from the semi-classical closure.

    Approximate: accurate for weak two-photon coupling and degrading as
    the right-bath temperature grows; at equal temperatures it retains a
    small residual (the exact current is zero) that measures the closure
    error itself.
    """
    _, nR, _, _ = _occupations(config)
    coeffs = semiclassical_occupation(config)
    return config.omega * config.right.gamma * (nR - coeffs.root)


def weak_coupling_current(config: ModelConfig) -> float:
    """First order in Gamma_L: linear current plus the leading correction.

    J = w gL gR/(gL+gR) (nR - nL)
        - w GL gR/(gL+gR) [2 n0^2 - 4 mL (2 n0 - 1)],

    with n0 the linear occupation.  The mL term has no right-bath
    counterpart here, which is what breaks the forward/reverse symmetry.
    """
    _require_one_sided(config)
    gL, gR = config.left.gamma, config.right.gamma
    if gL + gR <= 0:
        raise NoCoupling("weak-coupling expansion needs a one-photon channel")
    nL, nR, mL, _ = _occupations(config)
    GL = config.left.Gamma_two
    n0 = (gL * nL + gR * nR) / (gL + gR)
    linear = config.omega * gL * gR / (gL + gR) * (nR - nL)
    correction = config.omega * GL * gR / (gL + gR) * (2.0 * n0**2 - 4.0 * mL * (2.0 * n0 - 1.0))
    return linear - correction
