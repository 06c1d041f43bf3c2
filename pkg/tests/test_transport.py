import numpy as np
import pytest

from thermoflux import (
    BathSpec,
    ChannelRates,
    ModelConfig,
    Sector,
    fock_moments,
    forward_reverse,
    heat_current,
    linear_current,
    population_heat_current,
    rectification,
    solve_rate_equation,
    steady_state,
    transport_result,
    two_photon_current,
)


def fig5_config(dim=30, TL=2.0, TR=0.5, GR=0.01):
    return ModelConfig(
        omega=1.0,
        dim=dim,
        left=BathSpec(temperature=TL, gamma=0.2, Gamma_two=0.1),
        right=BathSpec(temperature=TR, gamma=0.2, Gamma_two=GR),
    )


def test_rectification_trivial_values():
    assert rectification(1.7, -1.7) == 0.0
    assert rectification(1.7, 0.0) == 1.0
    assert rectification(3.0, -1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert rectification(0.0, 0.0) == 0.0  # no transport: defined as zero


def test_equilibrium_currents_vanish():
    cfg = fig5_config(TL=1.3, TR=1.3)
    rho = steady_state(cfg).rho
    assert abs(heat_current(rho, cfg, "L")) < 1e-10
    assert abs(heat_current(rho, cfg, "R")) < 1e-10


def test_equal_temperature_two_photon_current_vanishes():
    cfg = ModelConfig(
        omega=1.0,
        dim=40,
        left=BathSpec(temperature=2.0, Gamma_two=0.1),
        right=BathSpec(temperature=2.0, Gamma_two=0.001),
    )
    res = steady_state(cfg)  # even sector by default
    assert abs(heat_current(res.rho, cfg, "R")) < 1e-10


def test_energy_balance_and_moment_invariants():
    cfg = fig5_config()
    tr = transport_result(cfg, steady_state(cfg))
    assert tr.balance_residual <= 1e-9 * max(abs(tr.J_left), abs(tr.J_right))
    assert tr.J_net == tr.J_right
    assert tr.n_n_minus_1 >= 0.0
    assert tr.n1_n2 >= 2.0
    # moment identity <(n+1)(n+2)> = <n^2> + 3<n> + 2, via <n(n-1)> = <n^2> - <n>
    n2 = tr.n_n_minus_1 + tr.mean_n
    assert tr.n1_n2 == pytest.approx(n2 + 3 * tr.mean_n + 2.0, rel=1e-12)


def test_heat_current_against_rate_equation_oracle():
    # reference numbers come from the independent birth-death populations
    cfg = fig5_config(dim=35)
    rho = steady_state(cfg).rho
    pops = solve_rate_equation(cfg)
    for side in ("L", "R"):
        rates = ChannelRates.from_bath(cfg.bath(side), cfg.omega)
        j_oracle = population_heat_current(pops.p, rates, cfg.omega)
        assert heat_current(rho, cfg, side) == pytest.approx(j_oracle, rel=1e-9, abs=1e-12)


def test_linear_antisymmetry_under_temperature_swap():
    cfg = ModelConfig(
        omega=1.0,
        dim=45,
        left=BathSpec(temperature=0.6, gamma=0.35),
        right=BathSpec(temperature=1.4, gamma=0.1),
    )
    j_fwd = transport_result(cfg, steady_state(cfg)).J_right
    swapped = cfg.with_swapped_temperatures()
    j_rev = transport_result(swapped, steady_state(swapped)).J_right
    assert j_fwd == pytest.approx(-j_rev, rel=1e-10)


def test_linear_no_rectification():
    cfg = ModelConfig(
        omega=1.0,
        dim=45,
        left=BathSpec(temperature=0.6, gamma=0.35),
        right=BathSpec(temperature=1.4, gamma=0.1),
    )
    rr = forward_reverse(cfg)
    assert rr.R <= 1e-10
    assert rr.J_forward == pytest.approx(linear_current(cfg), rel=1e-8)


def test_symmetric_two_photon_no_rectification():
    cfg = ModelConfig(
        omega=1.0,
        dim=50,
        left=BathSpec(temperature=2.0, Gamma_two=0.05),
        right=BathSpec(temperature=0.5, Gamma_two=0.05),
    )
    rr = forward_reverse(cfg)
    assert rr.R <= 1e-10


def test_asymmetric_two_photon_rectifies_like_closed_form():
    cfg = ModelConfig(
        omega=1.0,
        dim=60,
        left=BathSpec(temperature=2.0, Gamma_two=0.1),
        right=BathSpec(temperature=0.5, Gamma_two=0.001),
    )
    rr = forward_reverse(cfg)
    assert rr.R > 0.0
    j_fwd = two_photon_current(cfg)
    j_rev = two_photon_current(cfg.with_swapped_temperatures())
    analytic_R = rectification(j_fwd, j_rev)
    assert rr.R == pytest.approx(analytic_R, rel=1e-6)


def test_sign_convention_hot_right_bath_pushes_heat_in():
    for cfg in (
        fig5_config(TL=0.5, TR=2.0),
        ModelConfig(omega=1.0, dim=40,
                    left=BathSpec(temperature=0.5, gamma=0.3),
                    right=BathSpec(temperature=1.5, gamma=0.2)),
        ModelConfig(omega=1.0, dim=50,
                    left=BathSpec(temperature=0.5, Gamma_two=0.1),
                    right=BathSpec(temperature=2.0, Gamma_two=0.01)),
    ):
        res = steady_state(cfg)
        assert heat_current(res.rho, cfg, "R") > 0.0


def test_rectification_coefficient_bounded():
    for TL, TR, GR in ((2.0, 0.5, 0.001), (3.0, 0.3, 0.01), (1.5, 0.7, 0.05)):
        rr = forward_reverse(fig5_config(dim=40, TL=TL, TR=TR, GR=GR))
        assert 0.0 <= rr.R <= 1.0


def test_forward_reverse_flags_no_transport():
    cfg = fig5_config(TL=1.0, TR=1.0)
    rr = forward_reverse(cfg)
    assert rr.no_transport
    assert rr.R == 0.0


def test_fock_moments_vacuum():
    mean_n, emission, absorption = fock_moments(np.array([1.0, 0.0, 0.0]))
    assert (mean_n, emission) == (0.0, 0.0)
    assert absorption == 2.0


def test_sector_result_heat_current_uses_truncation_aware_moments():
    # moment route must agree with the dissipator route even when the
    # steady state has weight near the truncation edge
    cfg = ModelConfig(
        omega=1.0,
        dim=12,  # deliberately under-truncated
        left=BathSpec(temperature=4.0, gamma=0.2, Gamma_two=0.1),
        right=BathSpec(temperature=2.0, gamma=0.2, Gamma_two=0.01),
    )
    rho = steady_state(cfg).rho
    # no CrossCheckFailed even though the tail is heavy
    heat_current(rho, cfg, "L")
    heat_current(rho, cfg, "R")
