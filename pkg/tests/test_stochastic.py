import math

import numpy as np
import pytest

from enhdiff import rng
from enhdiff.errors import ConfigError, UnsupportedVariantError
from enhdiff.flows import Circular, ConstantShear, HolderShear, Isotropic, Zero
from enhdiff.stochastic import (
    Coupling,
    SdeConfig,
    shear_increment_functional,
    simulate_ensemble,
    simulate_trajectory,
    two_point_separation,
)

TWO_PI = 2.0 * math.pi


def test_config_validation():
    with pytest.raises(ConfigError):
        SdeConfig(dt=-0.1, t_final=1.0)
    with pytest.raises(ConfigError):
        SdeConfig(dt=2.0, t_final=1.0)


def test_step_schedule_sums_exactly():
    cfg = SdeConfig(dt=0.3, t_final=1.0)
    sizes = cfg.step_sizes()
    assert len(sizes) == 4
    assert sizes.sum() == pytest.approx(1.0, abs=1e-15)
    assert sizes[-1] == pytest.approx(0.1)


def test_zero_field_zero_kappa_is_identity():
    cfg = SdeConfig(dt=0.1, t_final=1.0)
    out = simulate_trajectory(Zero(), Isotropic(0.0), (1.5, -0.7), cfg, seed=3)
    assert out[0] == pytest.approx(1.5)
    assert out[1] == pytest.approx(-0.7)


def test_constant_drift_transport():
    # u = (c, 0) via a constant shear evaluated at y = 1
    cfg = SdeConfig(dt=0.25, t_final=2.0)
    out = simulate_trajectory(ConstantShear(1.5), Isotropic(0.0), (0.2, 1.0), cfg, seed=3)
    assert out[0] == pytest.approx((0.2 + 1.5 * 2.0) % TWO_PI, abs=1e-12)
    assert out[1] == pytest.approx(1.0)


def test_pure_diffusion_variance_matches_gaussian_law():
    # Var per coordinate = 2 kappa t; chi-square oracle at 3 SE
    kappa, t, n = 0.05, 1.0, 100_000
    cfg = SdeConfig(dt=0.01, t_final=t)
    ens = simulate_ensemble(Zero(), Isotropic(kappa), (3.0, 0.0), cfg, 11, n)
    v = ens.terminal_points[:, 1].var(ddof=1)
    se = 2.0 * kappa * t * math.sqrt(2.0 / (n - 1))
    assert abs(v - 2.0 * kappa * t) <= 3.0 * se


def test_zero_drift_terminal_kurtosis_is_gaussian():
    kappa, n = 0.1, 100_000
    cfg = SdeConfig(dt=0.05, t_final=1.0)
    ens = simulate_ensemble(Zero(), Isotropic(kappa), (0.0, 0.0), cfg, 5, n)
    z = ens.terminal_points[:, 1]
    z = (z - z.mean()) / z.std()
    kurt = float(np.mean(z ** 4))
    assert abs(kurt - 3.0) <= 3.0 * math.sqrt(24.0 / n)


def test_ensemble_reproducible_and_partition_independent():
    cfg = SdeConfig(dt=0.1, t_final=0.5)
    a = simulate_ensemble(Zero(), Isotropic(0.1), (0.0, 0.0), cfg, 42, 64)
    b = simulate_ensemble(Zero(), Isotropic(0.1), (0.0, 0.0), cfg, 42, 64)
    assert np.array_equal(a.terminal_points, b.terminal_points)
    # sample i of a larger ensemble equals the singleton with seed mix(seed, i)
    big = simulate_ensemble(Zero(), Isotropic(0.1), (0.0, 0.0), cfg, 42, 8)
    for i in (0, 3, 7):
        single = simulate_trajectory(
            Zero(), Isotropic(0.1), (0.0, 0.0), cfg, seed=int(rng.mix(42, i))
        )
        assert np.array_equal(big.terminal_points[i], single)


def test_deterministic_flow_collapses_ensemble():
    cfg = SdeConfig(dt=0.1, t_final=1.0)
    ens = simulate_ensemble(ConstantShear(1.0), Isotropic(0.0), (0.1, 0.2), cfg, 9, 50)
    assert np.all(ens.terminal_points == ens.terminal_points[0])


def test_ensemble_requires_samples():
    cfg = SdeConfig(dt=0.1, t_final=1.0)
    with pytest.raises(ConfigError):
        simulate_ensemble(Zero(), Isotropic(0.1), (0.0, 0.0), cfg, 1, 0)


def test_separation_frozen_without_noise():
    cfg = SdeConfig(dt=0.1, t_final=1.0)
    est = two_point_separation(
        Zero(), Isotropic(0.0), (0.0, 0.0), (5.0, 1.0), cfg,
        Coupling.INDEPENDENT_NOISE, 100, 7,
    )
    assert est.value == pytest.approx(26.0, abs=1e-12)
    assert est.standard_error == pytest.approx(0.0, abs=1e-12)


def test_common_noise_cancels_for_zero_field():
    cfg = SdeConfig(dt=0.05, t_final=1.0)
    for kappa in (0.01, 0.2):
        est = two_point_separation(
            Zero(), Isotropic(kappa), (0.0, 0.0), (2.0, -1.0), cfg,
            Coupling.COMMON_NOISE, 500, 7,
        )
        assert est.value == pytest.approx(5.0, rel=1e-12)


def test_independent_noise_doubles_diffusive_spread():
    # x = y: E|X - Y|^2 = 2 coords * 2 * (2 kappa t) = 8 kappa t;
    # constant confirmed against the brute-force run in the build notes
    kappa, t, n = 0.05, 1.0, 100_000
    cfg = SdeConfig(dt=0.01, t_final=t)
    est = two_point_separation(
        Zero(), Isotropic(kappa), (1.0, 1.0), (1.0, 1.0), cfg,
        Coupling.INDEPENDENT_NOISE, n, 9,
    )
    assert abs(est.value - 8.0 * kappa * t) <= 3.0 * est.standard_error


def test_weak_order_one_left_endpoint_variance():
    # For u = s*y the x-coordinate variance has the exact discrete value
    # 2k [t + s^2 dt^3 M(n)] with M(n) = sum_{j,k} min(j,k); enumeration oracle.
    kappa, s, t, n_mc = 0.05, 1.0, 1.0, 200_000
    for dt in (0.1, 0.05):
        n = int(round(t / dt))
        js = np.arange(n)
        m = np.minimum(js[:, None], js[None, :]).sum()
        exact = 2.0 * kappa * (t + s ** 2 * dt ** 3 * m)
        cfg = SdeConfig(dt=dt, t_final=t)
        ens = simulate_ensemble(ConstantShear(s), Isotropic(kappa), (0.0, 0.0), cfg, 21, n_mc)
        # positions wrap into [0, 2pi); the spread is < pi so map back to the line
        x = ens.terminal_points[:, 0]
        x = np.where(x > math.pi, x - TWO_PI, x)
        v = x.var(ddof=1)
        se = exact * math.sqrt(2.0 / n_mc)
        assert abs(v - exact) <= 4.0 * se


def test_functional_closed_form_linear_shear():
    # Ito isometry: E|sqrt(2k) int (W1 - W2) ds|^2 = 4 k t^3 / 3
    kappa, t = 0.01, 1.0
    cfg = SdeConfig(dt=0.002, t_final=t)
    est = shear_increment_functional(ConstantShear(1.0), kappa, 0.0, cfg, 40_000, 3)
    assert abs(est.value - 4.0 * kappa * t ** 3 / 3.0) <= 3.5 * est.standard_error


def test_functional_vanishes_without_noise():
    cfg = SdeConfig(dt=0.01, t_final=1.0)
    est = shear_increment_functional(HolderShear(0.5, 1.0), 0.0, 0.3, cfg, 200, 5)
    assert est.value == 0.0


def test_functional_rejects_circular():
    cfg = SdeConfig(dt=0.01, t_final=1.0)
    with pytest.raises(UnsupportedVariantError):
        shear_increment_functional(Circular(1.0), 0.01, 0.0, cfg, 10, 1)


def test_circular_trajectory_reflects_at_inner_barrier():
    cfg = SdeConfig(dt=0.001, t_final=0.2)
    ens = simulate_ensemble(Circular(1.0), Isotropic(0.3), (0.01, 0.0), cfg, 33, 500)
    r = np.hypot(ens.terminal_points[:, 0], ens.terminal_points[:, 1])
    assert np.all(r >= 1e-6 * (1 - 1e-9))
