"""Truncated Fock-space operator algebra and thermal occupation factors.

Operators are plain dense complex ``numpy`` arrays on the number-state
basis |0>, ..., |dim-1>.  Everything here is pure and cheap; the heavy
lifting (superoperators, solves) lives in :mod:`thermoflux.lindblad` and
:mod:`thermoflux.steady`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Fock cutoffs below 3 make both two-photon jump operators identically
# zero, so they are rejected outright.
MIN_DIM = 3

# exp(x) overflows float64 near x ~ 709; beyond that the Bose factor
# underflows to zero anyway.
_EXP_OVERFLOW = 700.0


@dataclass(frozen=True)
class FockSpace:
    """Truncated single-mode Fock space with ``dim`` number states."""

    dim: int

    def __post_init__(self):
        if not isinstance(self.dim, int) or isinstance(self.dim, bool):
            raise TypeError(f"Fock dimension must be an integer, got {self.dim!r}")
        if self.dim < MIN_DIM:
            raise ValueError(
                f"Fock dimension must be >= {MIN_DIM} (two-photon jump operators "
                f"vanish identically below that), got {self.dim}"
            )


@dataclass(frozen=True)
class BathSpec:
    """One thermal bath: temperature plus one- and two-photon coupling rates.

    Units: k_B = hbar = 1, so temperatures are energies and rates are
    inverse times.  ``gamma`` drives single-quantum exchange at the mode
    frequency, ``Gamma_two`` drives two-quantum exchange at twice the mode
    frequency.
    """

    temperature: float
    gamma: float = 0.0
    Gamma_two: float = 0.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"bath temperature must be > 0, got {self.temperature}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.Gamma_two < 0:
            raise ValueError(f"Gamma_two must be >= 0, got {self.Gamma_two}")

    @property
    def coupled(self) -> bool:
        return self.gamma + self.Gamma_two > 0


@dataclass(frozen=True)
class ModelConfig:
    """Full problem statement: oscillator frequency, cutoff, and two baths."""

    omega: float
    dim: int
    left: BathSpec
    right: BathSpec

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        FockSpace(self.dim)  # reuse the cutoff validation

    @property
    def space(self) -> FockSpace:
        return FockSpace(self.dim)

    def bath(self, side: str) -> BathSpec:
        if side == "L":
            return self.left
        if side == "R":
            return self.right
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")

    def with_swapped_temperatures(self) -> "ModelConfig":
        """Swap the bath temperatures; coupling rates stay on their side."""
        new_left = replace(self.left, temperature=self.right.temperature)
        new_right = replace(self.right, temperature=self.left.temperature)
        return replace(self, left=new_left, right=new_right)

    def with_dim(self, dim: int) -> "ModelConfig":
        return replace(self, dim=dim)


def annihilation(space: FockSpace) -> np.ndarray:
    """Annihilation operator: a[n-1, n] = sqrt(n), zero elsewhere."""
    a = np.zeros((space.dim, space.dim), dtype=complex)
    ns = np.arange(1, space.dim)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def creation(space: FockSpace) -> np.ndarray:
    """Creation operator, the conjugate transpose of :func:`annihilation`."""
    return annihilation(space).conj().T


def number_operator(space: FockSpace) -> np.ndarray:
    """Number operator diag(0, 1, ..., dim-1)."""
    return np.diag(np.arange(space.dim, dtype=complex))


def thermal_occupation(omega_eff: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(omega_eff/T) - 1).

    Used at ``omega_eff = omega`` for the one-photon factor and at
    ``omega_eff = 2*omega`` for the two-photon factor.  Underflows cleanly
    to 0.0 for omega_eff/T large instead of overflowing to NaN/inf.
    """
    if not omega_eff > 0:
        raise ValueError(f"omega_eff must be > 0, got {omega_eff}")
    if not temperature > 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    x = omega_eff / temperature
    if x > _EXP_OVERFLOW:
        return 0.0
    return 1.0 / math.expm1(x)
