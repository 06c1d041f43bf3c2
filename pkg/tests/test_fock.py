import math

import numpy as np
import pytest

from thermoflux import BathSpec, FockSpace, ModelConfig, annihilation, creation, number_operator, thermal_occupation

# frozen Bose factors (direct evaluation of 1/expm1(w/T))
NBAR_W1_T1 = 0.5819767068693265
NBAR_W1_T2 = 1.5414940825367983


def test_annihilation_dim3_matrix_elements():
    a = annihilation(FockSpace(3))
    expected = np.array([[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=complex)
    np.testing.assert_array_equal(a, expected)


def test_number_operator_from_ladder_product():
    a = annihilation(FockSpace(3))
    np.testing.assert_allclose(a.conj().T @ a, np.diag([0.0, 1.0, 2.0]), atol=0)
    np.testing.assert_array_equal(number_operator(FockSpace(3)), np.diag([0.0, 1.0, 2.0]))


def test_commutator_holds_away_from_truncation_edge():
    # truncation breaks [a, a^dag] = 1 only in the last row/column;
    # (sqrt(n))^2 reproduces n only to machine epsilon, hence the atol
    space = FockSpace(50)
    a = annihilation(space)
    comm = a @ a.conj().T - a.conj().T @ a
    block = comm[:49, :49] - np.eye(49)
    assert np.max(np.abs(block)) < 1e-13
    assert comm[49, 49].real == pytest.approx(-49.0)  # the broken corner


def test_creation_is_adjoint():
    space = FockSpace(17)
    np.testing.assert_array_equal(creation(space), annihilation(space).conj().T)


@pytest.mark.parametrize("dim", [0, 1, 2, -3])
def test_small_cutoffs_rejected(dim):
    with pytest.raises((ValueError, TypeError)):
        FockSpace(dim)


def test_thermal_occupation_frozen_values():
    assert thermal_occupation(1.0, 1.0) == pytest.approx(NBAR_W1_T1, rel=1e-14)
    assert thermal_occupation(1.0, 2.0) == pytest.approx(NBAR_W1_T2, rel=1e-14)
    # occupation at doubled frequency, same T: m = n^2/(2n+1)
    n = thermal_occupation(1.0, 2.0)
    m = thermal_occupation(2.0, 2.0)
    assert m == pytest.approx(n * n / (2 * n + 1), rel=1e-12)
    assert m == pytest.approx(NBAR_W1_T1, rel=1e-14)  # 2w/T identical to w/T here


def test_thermal_occupation_frozen_bath_limit():
    assert thermal_occupation(1.0, 1e-6) <= 1e-300
    assert thermal_occupation(1.0, 1e-9) == 0.0  # underflow clamps to zero, never NaN


def test_thermal_occupation_monotone():
    temps = np.linspace(0.1, 5.0, 40)
    vals = [thermal_occupation(1.0, t) for t in temps]
    assert all(b > a for a, b in zip(vals, vals[1:]))  # increasing in T
    freqs = np.linspace(0.2, 6.0, 40)
    vals_w = [thermal_occupation(w, 1.3) for w in freqs]
    assert all(b < a for a, b in zip(vals_w, vals_w[1:]))  # decreasing in frequency


def test_double_frequency_occupation_smaller():
    for t in (0.3, 1.0, 2.5, 10.0):
        assert thermal_occupation(2.0, t) < thermal_occupation(1.0, t)


def test_bath_spec_validation():
    with pytest.raises(ValueError):
        BathSpec(temperature=-1.0)
    with pytest.raises(ValueError):
        BathSpec(temperature=1.0, gamma=-0.1)
    with pytest.raises(ValueError):
        BathSpec(temperature=1.0, Gamma_two=-0.1)
    assert not BathSpec(temperature=1.0).coupled
    assert BathSpec(temperature=1.0, gamma=0.1).coupled


def test_model_config_validation_and_swap():
    cfg = ModelConfig(
        omega=1.0,
        dim=10,
        left=BathSpec(temperature=2.0, gamma=0.1),
        right=BathSpec(temperature=0.5, gamma=0.2, Gamma_two=0.01),
    )
    swapped = cfg.with_swapped_temperatures()
    assert swapped.left.temperature == 0.5 and swapped.right.temperature == 2.0
    # couplings stay attached to their side
    assert swapped.left.gamma == 0.1 and swapped.right.Gamma_two == 0.01
    with pytest.raises(ValueError):
        ModelConfig(omega=0.0, dim=10, left=cfg.left, right=cfg.right)
    with pytest.raises(ValueError):
        ModelConfig(omega=1.0, dim=2, left=cfg.left, right=cfg.right)
