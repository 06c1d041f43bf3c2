"""GKSL generator construction in vectorized (superoperator) form.

Vectorization convention — column stacking, fixed once for the whole
package: ``vec(rho)`` stacks the columns of ``rho``, so the matrix entry
``rho[i, j]`` sits at vector index ``j*dim + i`` and

    vec(A @ X @ B) == kron(B.T, A) @ vec(X).

Consequences used below:

    rho -> O rho Od        : kron(conj(O), O)
    rho -> M rho           : kron(I, M)
    rho -> rho M           : kron(M.T, I)

All superoperators are dense complex ``(dim**2, dim**2)`` arrays.  Dense
is deliberate: at dim = 50 the generator is 2500 x 2500, well inside
comfortable LAPACK territory, and it keeps the numerics predictable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import BathSpec, FockSpace, ModelConfig, annihilation, number_operator, thermal_occupation


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) == Tr[rho]."""
    t = np.zeros(dim * dim, dtype=complex)
    t[np.arange(dim) * (dim + 1)] = 1.0
    return t


# The assemblers below write superoperators directly into a
# (dim, dim, dim, dim) view, exploiting that vec index pairs factorize:
# reshaped L[r1, r2, c1, c2] corresponds to kron(F, S)[r1*dim+r2, c1*dim+c2]
# = F[r1, c1] * S[r2, c2].  For the banded ladder operators this replaces
# O(dim^4) dense kron traffic with O(dim^3) structured writes; the values
# written are identical to the kron formulas.

def _add_left_right_multipliers(L4: np.ndarray, left: np.ndarray, right: np.ndarray) -> None:
    """Accumulate rho -> left @ rho + rho @ right.

    Writes go through stride-tricked diagonal views (targets are the
    disjoint cell families [i, r2, i, c2] and [r1, i, c1, i]), which lets
    numpy vectorize what would otherwise be dim**2 scattered block adds.
    """
    dim = L4.shape[0]
    s0, s1, s2, s3 = L4.strides
    # kron(I, left): cells [i, r2, i, c2]
    view_left = np.lib.stride_tricks.as_strided(
        L4, shape=(dim, dim, dim), strides=(s0 + s2, s1, s3), writeable=True
    )
    view_left += left[None, :, :]
    # kron(right.T, I): cells [r1, i, c1, i]
    view_right = np.lib.stride_tricks.as_strided(
        L4, shape=(dim, dim, dim), strides=(s0, s2, s1 + s3), writeable=True
    )
    view_right += right.T[:, :, None]


def _add_sandwich(L4: np.ndarray, jump: np.ndarray, rate: float) -> None:
    """Accumulate rho -> rate * (jump @ rho @ jump^dag)."""
    rows, cols = np.nonzero(jump)
    if rows.size == 0 or rate == 0.0:
        return
    vals = jump[rows, cols]
    weights = rate * np.conj(vals)[:, None] * vals[None, :]
    # (row_i, col_i) pairs are distinct, so the index tuples are unique
    L4[rows[:, None], rows[None, :], cols[:, None], cols[None, :]] += weights


def hamiltonian_superoperator(H: np.ndarray) -> np.ndarray:
    """Vectorized commutator part -i[H, .]."""
    dim = H.shape[0]
    L4 = np.zeros((dim, dim, dim, dim), dtype=complex)
    _add_left_right_multipliers(L4, -1j * H, 1j * H)
    return L4.reshape(dim * dim, dim * dim)


def dissipator(jump: np.ndarray, rate: float) -> np.ndarray:
    """Vectorized D[O]rho = O rho Od - (1/2){Od O, rho}, scaled by ``rate``."""
    if rate < 0:
        raise ValueError(f"dissipator rate must be >= 0, got {rate}")
    jump = np.asarray(jump, dtype=complex)
    if jump.ndim != 2 or jump.shape[0] != jump.shape[1]:
        raise ValueError(f"jump operator must be square, got shape {jump.shape}")
    dim = jump.shape[0]
    L4 = np.zeros((dim, dim, dim, dim), dtype=complex)
    _add_dissipator(L4, jump, rate)
    return L4.reshape(dim * dim, dim * dim)


def _add_dissipator(L4: np.ndarray, jump: np.ndarray, rate: float) -> None:
    _add_sandwich(L4, jump, rate)
    anticom = (-0.5 * rate) * (jump.conj().T @ jump)
    _add_left_right_multipliers(L4, anticom, anticom)


def apply_dissipator(rho: np.ndarray, jump: np.ndarray, rate: float) -> np.ndarray:
    """D[O]rho evaluated directly with matrix products.

    Same linear map as :func:`dissipator`, but O(dim^3) time and O(dim^2)
    memory; use this wherever the dense superoperator matrix would be
    wastefully large.
    """
    jd = jump.conj().T
    jdj = jd @ jump
    return rate * (jump @ rho @ jd - 0.5 * (jdj @ rho + rho @ jdj))


@dataclass(frozen=True)
class ChannelRates:
    """Normal form for one bath contact: explicit per-channel jump rates.

    ``down1``/``up1`` multiply D[a]/D[a^dag], ``down2``/``up2`` multiply
    D[a^2]/D[a^dag^2], ``dephasing`` multiplies D[a^dag a].  A thermal bath
    maps onto (gamma(n+1), gamma n, Gamma(m+1), Gamma m, 0); engineered
    dissipation (see :mod:`thermoflux.tls_reduction`) supplies the rates
    directly.
    """

    down1: float
    up1: float
    down2: float
    up2: float
    dephasing: float = 0.0

    def __post_init__(self):
        for name in ("down1", "up1", "down2", "up2", "dephasing"):
            if getattr(self, name) < 0:
                raise ValueError(f"channel rate {name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def from_bath(cls, bath: BathSpec, omega: float) -> "ChannelRates":
        n = thermal_occupation(omega, bath.temperature)
        m = thermal_occupation(2.0 * omega, bath.temperature)
        return cls(
            down1=bath.gamma * (n + 1.0),
            up1=bath.gamma * n,
            down2=bath.Gamma_two * (m + 1.0),
            up2=bath.Gamma_two * m,
        )


def _channel_jumps(space: FockSpace, rates: ChannelRates) -> list[tuple[np.ndarray, float]]:
    a = annihilation(space)
    ad = a.conj().T
    pairs = [
        (a, rates.down1),
        (ad, rates.up1),
        (a @ a, rates.down2),
        (ad @ ad, rates.up2),
        (ad @ a, rates.dephasing),
    ]
    return [(op, rate) for op, rate in pairs if rate > 0]


def channel_dissipator(space: FockSpace, rates: ChannelRates) -> np.ndarray:
    """Sum of the dissipators of one contact, per-channel rates explicit.

    The anticommutator halves of all channels are pooled into a single
    multiplier matrix before touching the big array: the strided
    kron(I, .)/kron(., I) write pattern is the expensive part of assembly.
    """
    dim = space.dim
    L4 = np.zeros((dim, dim, dim, dim), dtype=complex)
    pooled = np.zeros((dim, dim), dtype=complex)
    for jump, rate in _channel_jumps(space, rates):
        _add_sandwich(L4, jump, rate)
        pooled += (-0.5 * rate) * (jump.conj().T @ jump)
    _add_left_right_multipliers(L4, pooled, pooled)
    return L4.reshape(dim * dim, dim * dim)


def apply_channel_dissipator(rho: np.ndarray, space: FockSpace, rates: ChannelRates) -> np.ndarray:
    """Matrix-application counterpart of :func:`channel_dissipator`."""
    a = annihilation(space)
    ad = a.conj().T
    drho = np.zeros_like(rho, dtype=complex)
    if rates.down1 > 0:
        drho += apply_dissipator(rho, a, rates.down1)
    if rates.up1 > 0:
        drho += apply_dissipator(rho, ad, rates.up1)
    if rates.down2 > 0:
        drho += apply_dissipator(rho, a @ a, rates.down2)
    if rates.up2 > 0:
        drho += apply_dissipator(rho, ad @ ad, rates.up2)
    if rates.dephasing > 0:
        drho += apply_dissipator(rho, ad @ a, rates.dephasing)
    return drho


def bath_dissipator(space: FockSpace, omega: float, bath: BathSpec) -> np.ndarray:
    """Thermal-bath dissipator: one-photon at omega plus two-photon at 2*omega."""
    return channel_dissipator(space, ChannelRates.from_bath(bath, omega))


def liouvillian(config: ModelConfig) -> np.ndarray:
    """Full generator: -i[H, .] plus the dissipators of both baths.

    The Hamiltonian term is kept even though H = omega a^dag a commutes
    with every steady state produced here; it exercises the commutator
    path and costs nothing.
    """
    space = config.space
    H = config.omega * number_operator(space)
    return (
        hamiltonian_superoperator(H)
        + bath_dissipator(space, config.omega, config.left)
        + bath_dissipator(space, config.omega, config.right)
    )


def apply_liouvillian(rho: np.ndarray, config: ModelConfig) -> np.ndarray:
    """d(rho)/dt for ``config`` via matrix products; avoids the dim^2 x dim^2 matrix."""
    space = config.space
    H = config.omega * number_operator(space)
    drho = -1j * (H @ rho - rho @ H)
    drho += apply_channel_dissipator(rho, space, ChannelRates.from_bath(config.left, config.omega))
    drho += apply_channel_dissipator(rho, space, ChannelRates.from_bath(config.right, config.omega))
    return drho


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    psd_tol: float = 1e-8,
) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and numerically PSD."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"density matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} differs from 1 beyond {trace_tol}")
    lam_min = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if lam_min < -psd_tol:
        raise ValueError(f"density matrix has eigenvalue {lam_min:.3e} below -{psd_tol}")
