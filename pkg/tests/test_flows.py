import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enhdiff.errors import DomainError, UnsupportedVariantError
from enhdiff.flows import (
    AnisotropicRadial,
    Circular,
    ConstantShear,
    HolderShear,
    Isotropic,
    PowerShear,
    Zero,
    eval_diffusivity,
    eval_velocity,
    shear_profile,
    verify_holder,
)


def test_power_shear_pointwise():
    assert eval_velocity(PowerShear(2), (0.0, 0.5)) == (0.25, 0.0)


def test_zero_field_anywhere():
    assert eval_velocity(Zero(), (3.0, -17.2)) == (0.0, 0.0)


def test_holder_sqrt_value():
    ux, uy = eval_velocity(HolderShear(alpha=0.5, c=1.0), (0.0, 0.09))
    assert ux == pytest.approx(0.3, abs=1e-15)
    assert uy == 0.0


def test_constant_shear_is_linear():
    assert eval_velocity(ConstantShear(2.5), (0.0, -2.0)) == (-5.0, 0.0)


def test_circular_velocity_vector():
    # angular speed r^q means linear velocity r^q * (-y, x)
    ux, uy = eval_velocity(Circular(q=1.0), (1.0, 0.0))
    assert (ux, uy) == pytest.approx((0.0, 1.0))
    ux, uy = eval_velocity(Circular(q=2.0), (0.0, 2.0))
    assert (ux, uy) == pytest.approx((-8.0, 0.0))


def test_circular_origin_rejected():
    with pytest.raises(DomainError):
        eval_velocity(Circular(q=1.0), (0.0, 0.0))


def test_eval_velocity_is_pure():
    field = PowerShear(3)
    a = eval_velocity(field, (0.1, 0.7))
    b = eval_velocity(field, (0.1, 0.7))
    assert a == b


def test_diffusivity_values():
    assert eval_diffusivity(Isotropic(0.01), (4.0, 5.0)) == 0.01
    assert eval_diffusivity(AnisotropicRadial(kappa=0.01, gamma=1.0), 2.0) == pytest.approx(0.02)
    assert eval_diffusivity(AnisotropicRadial(kappa=0.1, gamma=0.0), 7.0) == pytest.approx(0.1)
    # gamma > 0 at the origin returns 0 by continuity
    assert eval_diffusivity(AnisotropicRadial(kappa=0.1, gamma=0.5), 0.0) == 0.0


def test_anisotropic_monotone_in_r():
    model = AnisotropicRadial(kappa=0.05, gamma=0.7)
    rs = np.linspace(0.0, 3.0, 50)
    vals = [eval_diffusivity(model, r) for r in rs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_power_shear_derivative_conditions(n):
    # Richardson-extrapolated central differences: u^(j)(0) = 0 for j < n,
    # u^(n)(0) = n! within 1%.
    field = PowerShear(n)

    def deriv(j, h):
        # central difference of order j via binomial stencil
        ks = np.arange(j + 1)
        coef = (-1.0) ** (j - ks) * [math.comb(j, int(k)) for k in ks]
        pts = (ks - j / 2.0) * h
        vals = shear_profile(field, pts)
        return float(np.dot(coef, vals)) / h ** j

    for j in range(1, n):
        seq = [abs(deriv(j, h)) for h in (0.1, 0.05, 0.025)]
        # tends to 0 as the step shrinks (quadratically for these stencils)
        assert seq[-1] <= max(seq[0] / 4.0, 1e-12)
        assert seq[-1] <= 0.01 * math.factorial(n)
    rich = [deriv(n, h) for h in (0.02, 0.01)]
    extrap = rich[1] + (rich[1] - rich[0]) / 3.0
    assert extrap == pytest.approx(math.factorial(n), rel=0.01)


def test_verify_holder_lipschitz_case():
    chk = verify_holder(HolderShear(alpha=1.0, c=1.0), (-1.0, 1.0), 5000, seed=1)
    assert chk.max_ratio <= 1.0 + 1e-12
    assert chk.holds


def test_verify_holder_sqrt_case_brute_force():
    # 1e4 sampled pairs; the sharp constant for the odd sqrt profile is
    # 2^(1-alpha) * c, attained by antisymmetric pairs
    field = HolderShear(alpha=0.5, c=1.0)
    chk = verify_holder(field, (-1.0, 1.0), 10_000, seed=2)
    assert chk.holds
    assert chk.max_ratio <= field.holder_constant * (1 + 1e-12)
    # brute-force oracle: dense antisymmetric pairs approach the constant
    y = np.linspace(1e-6, 1.0, 2000)
    ratio = (2.0 * np.sqrt(y)) / (2.0 * y) ** 0.5
    assert np.max(ratio) == pytest.approx(field.holder_constant, rel=1e-9)


def test_verify_holder_rejects_power_shear():
    with pytest.raises(UnsupportedVariantError):
        verify_holder(PowerShear(2), (-1.0, 1.0), 100, seed=0)


@given(st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
@settings(max_examples=50, deadline=None)
def test_shear_profiles_depend_only_on_y(x, y):
    for field in (Zero(), ConstantShear(1.3), PowerShear(2), HolderShear(0.7, 2.0)):
        ux, uy = eval_velocity(field, (x, y))
        ux2, _ = eval_velocity(field, (x + 1.0, y))
        assert uy == 0.0
        assert ux == ux2


@given(st.floats(0.05, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.0, 1.0))
@settings(max_examples=50, deadline=None)
def test_parameter_validation(alpha, c, kappa, gamma):
    HolderShear(alpha=alpha, c=c)
    Isotropic(kappa)
    AnisotropicRadial(kappa=kappa, gamma=gamma)
    with pytest.raises(ValueError):
        HolderShear(alpha=1.5, c=c)
    with pytest.raises(ValueError):
        PowerShear(0)
    with pytest.raises(ValueError):
        Isotropic(1.0)
