"""Steady-state solvers for the vectorized generator and its diagonal oracle.

Two independent routes to the same stationary distribution:

* :func:`solve_steady` works on the dense ``dim**2 x dim**2`` generator,
  imposing Tr[rho] = 1 by replacing the last row of the linear system with
  the vectorized trace functional.  The last row is the safe one to drop:
  trace preservation makes the population rows linearly dependent, and the
  final vec index is a population coordinate.
* :func:`solve_rate_equation` never touches the superoperator; it builds
  the classical birth-death generator on Fock populations from the jump
  rates directly and solves that.  Because every generator in this package
  maps diagonal states to diagonal states, the two routes must agree on
  the populations, which the tests enforce.

Pure two-photon coupling conserves Fock parity, so the full generator has
a degenerate null space (one steady state per parity sector).  Such solves
must be done per sector; :func:`solve_steady` detects the degeneracy and
refuses to pick a state silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve, svdvals

from .fock import MIN_DIM, FockSpace, ModelConfig, annihilation
from .lindblad import (
    ChannelRates,
    apply_liouvillian,
    liouvillian,
    trace_functional,
    unvectorize,
    vectorize,
)

# Singular values below this fraction of the largest one count toward the
# numerical nullity; scale-invariant and robust at dim = 50.
NULLITY_RTOL = 1e-10

# 1-norm reciprocal condition estimate below which the trace-constrained
# system is treated as (near-)singular and inspected for degeneracy.
_RCOND_FLOOR = 1e-13

# Population clamp policy: entries in [-1e-14, 0) are roundoff and get
# clamped to zero; anything more negative is a solver failure.
_POP_FLOOR = -1e-14


class Sector(Enum):
    """Which part of the Fock-population space a solve is restricted to."""

    FULL = "full"
    EVEN_PARITY = "even"
    ODD_PARITY = "odd"


class DegenerateSteadyState(Exception):
    """Null space dimension > 1: the steady state is not unique."""

    def __init__(self, nullity: int, message: str | None = None):
        self.nullity = nullity
        super().__init__(message or (
            f"steady state is degenerate (numerical nullity {nullity}); "
            "solve a parity sector instead"
        ))


class NonConvergent(Exception):
    """Solver produced a residual above tolerance or unphysical populations."""


class CutoffExceeded(Exception):
    """No converged Fock cutoff found below the hard cap."""


@dataclass(frozen=True)
class SteadyStateResult:
    rho: np.ndarray          # dim x dim density matrix
    residual: float          # ||L vec(rho)||_2
    nullity: int
    sector: Sector


@dataclass(frozen=True)
class PopulationVector:
    """Fock populations: non-negative, summing to one."""

    dim: int
    p: np.ndarray

    def __post_init__(self):
        if self.p.shape != (self.dim,):
            raise ValueError(f"population vector shape {self.p.shape} != ({self.dim},)")
        if float(self.p.min()) < _POP_FLOOR:
            raise ValueError(f"population {self.p.min():.3e} below clamp floor {_POP_FLOOR}")
        if abs(float(self.p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"populations sum to {self.p.sum()}, not 1")


def _clamp_populations(p: np.ndarray, context: str) -> np.ndarray:
    """Apply the clamp policy: tiny negatives go to zero, worse ones raise."""
    worst = float(p.min())
    if worst < _POP_FLOOR:
        raise NonConvergent(f"{context}: population {worst:.3e} below {_POP_FLOOR}")
    p = np.where(p < 0.0, 0.0, p)
    return p / p.sum()


def nullity(superop: np.ndarray, rtol: float = NULLITY_RTOL) -> int:
    """Numerical null-space dimension by singular value inspection."""
    s = svdvals(superop)
    if s.size == 0 or s[0] == 0.0:
        return superop.shape[0]
    return int(np.count_nonzero(s < rtol * s[0]))


def population_indices(dim: int, sector: Sector) -> np.ndarray:
    """Vectorized indices of the diagonal entries belonging to ``sector``."""
    ns = np.arange(dim)
    if sector is Sector.EVEN_PARITY:
        ns = ns[ns % 2 == 0]
    elif sector is Sector.ODD_PARITY:
        ns = ns[ns % 2 == 1]
    return ns * (dim + 1)


def _constrained_solve(A: np.ndarray, constraint: np.ndarray, what: str):
    """Replace the last row of A with ``constraint``, RHS 1, and solve.

    Returns (solution, rcond).  One step of iterative refinement keeps the
    residual near machine precision, which the antisymmetry checks in
    :mod:`thermoflux.transport` rely on.
    """
    M = A.copy()
    M[-1, :] = constraint
    b = np.zeros(M.shape[0], dtype=M.dtype)
    b[-1] = 1.0
    anorm = np.linalg.norm(M, 1)
    with np.errstate(all="ignore"):
        lu, piv = lu_factor(M, check_finite=False)
    gecon = get_lapack_funcs("gecon", (M,))
    rcond, _ = gecon(lu, anorm)
    if not np.isfinite(rcond):
        rcond = 0.0
    if rcond < _RCOND_FLOOR:
        return None, float(rcond)
    x = lu_solve((lu, piv), b, check_finite=False)
    for _ in range(2):
        r = b - M @ x
        if np.linalg.norm(r) <= 1e-16 * anorm * np.linalg.norm(x):
            break
        x = x + lu_solve((lu, piv), r, check_finite=False)
    return x, float(rcond)


def solve_steady(superop: np.ndarray, sector: Sector = Sector.FULL, rtol: float = 1e-10) -> SteadyStateResult:
    """Solve L vec(rho) = 0 with Tr[rho] = 1.

    ``rtol`` bounds the accepted residual relative to ||L||_F.  With
    ``sector`` = EVEN_PARITY/ODD_PARITY the problem is first projected
    onto the even/odd Fock-population subspace (valid whenever the
    generator closes on populations, which holds for every generator
    built in this package).
    """
    n2 = superop.shape[0]
    dim = math.isqrt(n2)
    if dim * dim != n2 or superop.shape != (n2, n2):
        raise ValueError(f"superoperator shape {superop.shape} is not (d^2, d^2)")
    norm_L = np.linalg.norm(superop)

    if sector is Sector.FULL:
        x, rcond = _constrained_solve(superop, trace_functional(dim), "full steady state")
        if x is None:
            nul = nullity(superop)
            if nul > 1:
                raise DegenerateSteadyState(nul)
            raise NonConvergent(
                f"trace-constrained system near-singular (rcond {rcond:.2e}) "
                f"but nullity {nul}; cannot certify a steady state"
            )
        rho = unvectorize(x, dim)
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
        nul = 1  # rcond healthy => nullity <= 1, and a null vector exists
    else:
        idx = population_indices(dim, sector)
        block = superop[np.ix_(idx, idx)]
        q, rcond = _constrained_solve(block, np.ones(len(idx), dtype=complex), "sector steady state")
        if q is None:
            nul = nullity(block)
            if nul > 1:
                raise DegenerateSteadyState(nul)
            raise NonConvergent(f"sector system near-singular (rcond {rcond:.2e})")
        q = _clamp_populations(q.real, f"{sector.value}-sector solve")
        rho = np.zeros((dim, dim), dtype=complex)
        fock = idx // (dim + 1)
        rho[fock, fock] = q
        nul = 1

    residual = float(np.linalg.norm(superop @ vectorize(rho)))
    if residual > rtol * norm_L:
        raise NonConvergent(
            f"steady-state residual {residual:.3e} exceeds {rtol:.1e} * ||L||_F = {rtol * norm_L:.3e}"
        )
    return SteadyStateResult(rho=rho, residual=residual, nullity=nul, sector=sector)


def default_sector(config: ModelConfig) -> Sector:
    """Even parity when both one-photon rates vanish, full space otherwise.

    Pure two-photon dynamics never mixes parity, so the full-space steady
    state is ambiguous there; the even sector reproduces the conventional
    choice without user intervention.
    """
    if config.left.gamma == 0.0 and config.right.gamma == 0.0:
        return Sector.EVEN_PARITY
    return Sector.FULL


def projected_population_generator(
    dim: int,
    channels: list[ChannelRates],
    fock_indices: np.ndarray,
) -> np.ndarray:
    """Population block of the generator, derived from the jump matrices.

    For a jump operator O, D[O] moves population m -> n at |O[n, m]|^2 and
    drains level m at (Od O)[m, m]; summing the channels and restricting
    to ``fock_indices`` gives the block.  Everything comes from the matrix
    entries of the ladder operators, independent of the closed-form rate
    expressions used by :func:`rate_generator`.  Valid because the
    Hamiltonian is number-diagonal (no commutator flow on populations).
    """
    space = FockSpace(dim)
    a = annihilation(space)
    ad = a.conj().T
    full = np.zeros((dim, dim))
    for cr in channels:
        for jump, rate in (
            (a, cr.down1),
            (ad, cr.up1),
            (a @ a, cr.down2),
            (ad @ ad, cr.up2),
            (ad @ a, cr.dephasing),
        ):
            if rate > 0:
                full += rate * (np.abs(jump) ** 2 - np.diag(np.diag(jump.conj().T @ jump).real))
    return full[np.ix_(fock_indices, fock_indices)]


def _sector_fock_indices(dim: int, sector: Sector) -> np.ndarray:
    if sector is Sector.FULL:
        return np.arange(dim)
    if sector is Sector.EVEN_PARITY:
        return np.arange(0, dim, 2)
    return np.arange(1, dim, 2)


def _solve_population_block(
    block: np.ndarray,
    fock_indices: np.ndarray,
    dim: int,
    context: str,
) -> np.ndarray:
    q, rcond = _constrained_solve(block.astype(complex), np.ones(len(fock_indices), dtype=complex), context)
    if q is None:
        nul = nullity(block)
        if nul > 1:
            raise DegenerateSteadyState(nul)
        raise NonConvergent(f"{context}: system near-singular (rcond {rcond:.2e})")
    return _clamp_populations(q.real, context)


def steady_state(config: ModelConfig, sector: Sector | None = None, rtol: float = 1e-10) -> SteadyStateResult:
    """Build the generator for ``config`` and solve it (sector auto-chosen).

    Full-space solves assemble the dense vectorized generator.  Sector
    solves stay on the projected population block built by operator
    application, so they remain cheap in time and memory at cutoffs where
    the dim^2 x dim^2 matrix would be prohibitive.
    """
    if sector is None:
        sector = default_sector(config)
    if sector is Sector.FULL:
        return solve_steady(liouvillian(config), sector=sector, rtol=rtol)

    dim = config.dim
    channels = [
        ChannelRates.from_bath(config.left, config.omega),
        ChannelRates.from_bath(config.right, config.omega),
    ]
    fock = _sector_fock_indices(dim, sector)
    block = projected_population_generator(dim, channels, fock)
    q = _solve_population_block(block, fock, dim, f"{sector.value}-sector solve")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[fock, fock] = q
    residual = float(np.linalg.norm(apply_liouvillian(rho, config)))
    if residual > rtol * np.linalg.norm(block):
        raise NonConvergent(
            f"sector steady-state residual {residual:.3e} exceeds "
            f"{rtol:.1e} * ||block||_F = {rtol * np.linalg.norm(block):.3e}"
        )
    return SteadyStateResult(rho=rho, residual=residual, nullity=1, sector=sector)


def rate_generator(config: ModelConfig) -> np.ndarray:
    """Classical birth-death generator on Fock populations.

    Column n holds the outflow of p_n: one-step moves at rate
    gamma(n+1)*n down / gamma*n_bar*(n+1) up and two-step moves at
    Gamma(m+1)*n(n-1) down / Gamma*m_bar*(n+1)(n+2) up, summed over both
    baths.  Moves that would leave the truncated space are dropped, which
    matches the truncated jump operators exactly.
    """
    channels = [
        ChannelRates.from_bath(config.left, config.omega),
        ChannelRates.from_bath(config.right, config.omega),
    ]
    return rate_generator_from_channels(config.dim, channels)


def rate_generator_from_channels(dim: int, channels: list[ChannelRates]) -> np.ndarray:
    Q = np.zeros((dim, dim))
    ns = np.arange(dim, dtype=float)
    for cr in channels:
        # dephasing has no population dynamics; it never enters here
        down1 = cr.down1 * ns                      # n -> n-1
        up1 = cr.up1 * (ns + 1.0)                  # n -> n+1
        down2 = cr.down2 * ns * (ns - 1.0)         # n -> n-2
        up2 = cr.up2 * (ns + 1.0) * (ns + 2.0)     # n -> n+2
        for shift, rate in ((-1, down1), (1, up1), (-2, down2), (2, up2)):
            for n in range(dim):
                m = n + shift
                if 0 <= m < dim and rate[n] > 0.0:
                    Q[m, n] += rate[n]
    np.fill_diagonal(Q, Q.diagonal() - Q.sum(axis=0))
    return Q


def solve_rate_equation(config: ModelConfig, sector: Sector | None = None, rtol: float = 1e-10) -> PopulationVector:
    """Stationary populations of the birth-death generator.

    Independent of :func:`solve_steady` by construction; serves as the
    oracle for the vectorized route.  Sector handling mirrors
    :func:`solve_steady`: the generator is restricted to the even/odd
    Fock indices before solving.
    """
    if sector is None:
        sector = default_sector(config)
    Q = rate_generator(config)
    dim = config.dim
    if sector is Sector.FULL:
        fock = np.arange(dim)
    elif sector is Sector.EVEN_PARITY:
        fock = np.arange(0, dim, 2)
    else:
        fock = np.arange(1, dim, 2)
    block = Q[np.ix_(fock, fock)].astype(complex)
    q, rcond = _constrained_solve(block, np.ones(len(fock), dtype=complex), "rate equation")
    if q is None:
        nul = nullity(block)
        if nul > 1:
            raise DegenerateSteadyState(nul)
        raise NonConvergent(f"rate-equation system near-singular (rcond {rcond:.2e})")
    q = _clamp_populations(q.real, "rate equation")
    residual = float(np.linalg.norm(block.real @ q))
    if residual > rtol * np.linalg.norm(block):
        raise NonConvergent(f"rate-equation residual {residual:.3e} above tolerance")
    p = np.zeros(dim)
    p[fock] = q
    return PopulationVector(dim=dim, p=p)


def convergence_check(
    config: ModelConfig,
    observable_tol: float,
    *,
    probe_stride: int = 10,
    hard_cap: int = 400,
) -> int:
    """Smallest cutoff D at which <n> and both heat currents are converged.

    Converged means: changing D -> D + ``probe_stride`` moves each
    observable by less than ``observable_tol``.  Uses the rate-equation
    route (exact for the diagonal steady states produced here), so the
    scan is cheap even near the cap.
    """
    from .transport import population_heat_current  # deferred: avoids import cycle

    if not observable_tol > 0:
        raise ValueError(f"observable tolerance must be > 0, got {observable_tol}")

    def observables(dim: int) -> tuple[float, float, float]:
        cfg = config.with_dim(dim)
        pops = solve_rate_equation(cfg)
        ns = np.arange(dim, dtype=float)
        mean_n = float(ns @ pops.p)
        j_left = population_heat_current(pops.p, ChannelRates.from_bath(cfg.left, cfg.omega), cfg.omega)
        j_right = population_heat_current(pops.p, ChannelRates.from_bath(cfg.right, cfg.omega), cfg.omega)
        return (mean_n, j_left, j_right)

    cache: dict[int, tuple[float, float, float]] = {}

    def obs(dim: int) -> tuple[float, float, float]:
        if dim not in cache:
            cache[dim] = observables(dim)
        return cache[dim]

    for dim in range(MIN_DIM, hard_cap + 1):
        a = obs(dim)
        b = obs(dim + probe_stride)
        if all(abs(x - y) < observable_tol for x, y in zip(a, b)):
            return dim
    raise CutoffExceeded(
        f"observables not converged to {observable_tol} below cutoff {hard_cap}"
    )
