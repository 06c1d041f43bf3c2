"""Built-in invariant fixtures for the ``check`` subcommand.

Each check is a small, fast, self-contained assertion of one structural
property of the machinery.  They are deliberately redundant with the test
suite: this is the in-the-field smoke test an installed copy can run
without the repository.
"""

from __future__ import annotations

import numpy as np

from .analytic import two_photon_current, two_photon_ratio
from .fock import BathSpec, FockSpace, ModelConfig, thermal_occupation
from .lindblad import apply_liouvillian, liouvillian, trace_functional, unvectorize, vectorize
from .steady import solve_rate_equation, steady_state
from .tls_reduction import TlsHoParams, effective_rates
from .transport import forward_reverse, heat_current, transport_result


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (m + m.conj().T)


def _full_config(dim=12, TL=2.0, TR=0.5):
    return ModelConfig(
        omega=1.0,
        dim=dim,
        left=BathSpec(temperature=TL, gamma=0.2, Gamma_two=0.1),
        right=BathSpec(temperature=TR, gamma=0.2, Gamma_two=0.01),
    )


def check_trace_preservation():
    cfg = _full_config()
    L = liouvillian(cfg)
    tvec = trace_functional(cfg.dim)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        rho = _random_hermitian(cfg.dim, rng)
        worst = max(worst, abs(tvec @ (L @ vectorize(rho))))
    if worst > 1e-10:
        raise AssertionError(f"trace not preserved: worst |Tr[L rho]| = {worst:.3e}")


def check_hermiticity_preservation():
    cfg = _full_config()
    L = liouvillian(cfg)
    rng = np.random.default_rng(11)
    for _ in range(20):
        out = unvectorize(L @ vectorize(_random_hermitian(cfg.dim, rng)), cfg.dim)
        dev = np.max(np.abs(out - out.conj().T))
        if dev > 1e-10:
            raise AssertionError(f"Hermiticity broken by {dev:.3e}")


def check_diagonal_closure():
    cfg = _full_config()
    rng = np.random.default_rng(13)
    p = rng.random(cfg.dim)
    rho = np.diag(p / p.sum()).astype(complex)
    drho = apply_liouvillian(rho, cfg)
    off = np.max(np.abs(drho - np.diag(np.diag(drho))))
    if off > 1e-12:
        raise AssertionError(f"diagonal state left the diagonal by {off:.3e}")


def check_oracle_equivalence():
    cfg = _full_config(dim=25)
    rho = steady_state(cfg).rho
    pops = solve_rate_equation(cfg)
    diff = np.max(np.abs(np.diag(rho).real - pops.p))
    if diff > 1e-9:
        raise AssertionError(f"vectorized vs rate-equation populations differ by {diff:.3e}")


def check_energy_balance():
    cfg = _full_config(dim=30)
    tr = transport_result(cfg, steady_state(cfg))
    if tr.balance_residual > 1e-9 * max(abs(tr.J_left), abs(tr.J_right)):
        raise AssertionError(f"energy balance residual {tr.balance_residual:.3e}")


def check_equilibrium_zero_current():
    cfg = _full_config(dim=25, TL=1.3, TR=1.3)
    rho = steady_state(cfg).rho
    j = heat_current(rho, cfg, "R")
    if abs(j) > 1e-10:
        raise AssertionError(f"equal temperatures should carry no current, got {j:.3e}")


def check_two_photon_closed_form():
    cfg = ModelConfig(
        omega=1.0,
        dim=60,
        left=BathSpec(temperature=2.0, gamma=0.0, Gamma_two=0.1),
        right=BathSpec(temperature=0.5, gamma=0.0, Gamma_two=0.001),
    )
    res = steady_state(cfg)  # auto: even parity
    q = np.diag(res.rho).real[::2]
    ratios = q[1:10] / q[:9]
    r = two_photon_ratio(cfg)
    if np.max(np.abs(ratios - r)) > 1e-10:
        raise AssertionError("population ratio is not the detailed-balance constant")
    j = heat_current(res.rho, cfg, "R")
    exact = two_photon_current(cfg)
    rel = abs(j - exact) / abs(exact)
    if rel > 1e-6:
        raise AssertionError(f"closed-form current off by {rel:.3e}")


def check_linear_no_rectification():
    cfg = ModelConfig(
        omega=1.0,
        dim=50,
        left=BathSpec(temperature=0.5, gamma=0.3),
        right=BathSpec(temperature=1.5, gamma=0.1),
    )
    rr = forward_reverse(cfg)
    if rr.R > 1e-10:
        raise AssertionError(f"linear coupling must not rectify, got R = {rr.R:.3e}")


def check_tls_rate_scaling():
    base = TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.1, kappa=0.05, temperature=2.0)
    doubled = TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.2, kappa=0.05, temperature=2.0)
    r1, r2 = effective_rates(base), effective_rates(doubled)
    pairs = (
        (r2.gamma_minus / r1.gamma_minus, 4.0),
        (r2.gamma_plus / r1.gamma_plus, 4.0),
        (r2.Gamma_minus / r1.Gamma_minus, 8.0),
        (r2.Gamma_plus / r1.Gamma_plus, 8.0),
        (r2.gamma_d / r1.gamma_d, 8.0),
    )
    for got, want in pairs:
        if abs(got - want) > 1e-10:
            raise AssertionError(f"alpha-scaling ratio {got} != {want}")


def check_tls_thermal_mapping():
    from .tls_reduction import two_bath_effective_config

    left = TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.1, kappa=0.05, temperature=2.0)
    right = TlsHoParams(omega_o=5.0, omega_a=1.0, g=0.1, kappa=0.01, temperature=1.0)
    ec = two_bath_effective_config(left, right, FockSpace(10))
    for n_eff, T in ((ec.n_eff_left, 2.0), (ec.n_eff_right, 1.0)):
        want = thermal_occupation(1.0, T)
        if abs(n_eff - want) > 1e-10 * max(1.0, want):
            raise AssertionError(f"implied occupation {n_eff} != thermal {want}")


def built_in_checks(tolerance: float):
    """Ordered (name, callable) pairs; ``tolerance`` reserved for future knobs."""
    return [
        ("trace preservation", check_trace_preservation),
        ("hermiticity preservation", check_hermiticity_preservation),
        ("diagonal closure", check_diagonal_closure),
        ("oracle equivalence", check_oracle_equivalence),
        ("energy balance", check_energy_balance),
        ("equilibrium zero current", check_equilibrium_zero_current),
        ("two-photon closed form", check_two_photon_closed_form),
        ("linear no rectification", check_linear_no_rectification),
        ("tls rate scaling", check_tls_rate_scaling),
        ("tls thermal mapping", check_tls_thermal_mapping),
    ]
