import math

import numpy as np
import pytest

from enhdiff.errors import ConfigError
from enhdiff.flows import AnisotropicRadial, Isotropic
from enhdiff.grid import EnergyLedger
from enhdiff.polar import (
    PolarField,
    PolarGrid,
    PolarStepper,
    polar_field_from_function,
    step_polar,
)


@pytest.fixture
def annulus():
    return PolarGrid(96, 128, r_min=0.05, r_max=1.0)


def test_grid_validation():
    with pytest.raises(ConfigError):
        PolarGrid(64, 100, r_min=0.1, r_max=1.0)
    with pytest.raises(ConfigError):
        PolarGrid(64, 64, r_min=0.0, r_max=1.0)


def test_streamline_data_unmoved_by_advection(annulus):
    f = polar_field_from_function(annulus, lambda r, th: np.exp(-((r - 0.5) ** 2) / 0.01))
    out = step_polar(f, q=2.0, diff=Isotropic(0.0), dt=0.4)
    assert np.max(np.abs(out.values - f.values)) <= 1e-12


def test_mass_conserved_per_step(annulus):
    gen = np.random.Generator(np.random.PCG64(2))
    f = PolarField(annulus, gen.standard_normal((annulus.nr, annulus.ntheta)))
    m0 = annulus.mass(f.values)
    for q, kappa, dt in ((1.0, 0.01, 0.05), (2.0, 0.1, 0.2)):
        out = step_polar(f, q=q, diff=Isotropic(kappa), dt=dt)
        assert abs(annulus.mass(out.values) - m0) <= 1e-8 * max(abs(m0), 1.0)


def test_single_mode_narrow_annulus_decay():
    # sin(theta) with no radial variation decays like exp(-k t / rbar^2)
    rbar, kappa, t_final, dt = 1.0, 0.05, 2.0, 0.01
    grid = PolarGrid(64, 64, r_min=rbar - 0.02, r_max=rbar + 0.02)
    f0 = polar_field_from_function(grid, lambda r, th: np.sin(th))
    stepper = PolarStepper(grid, 1.0, Isotropic(kappa), dt)
    f = f0
    for _ in range(int(round(t_final / dt))):
        f = stepper.step(f)
    ratio = f.l2_norm() / f0.l2_norm()
    assert ratio == pytest.approx(math.exp(-kappa * t_final / rbar ** 2), rel=0.05)


def test_rotation_preserves_norm_without_diffusion(annulus):
    f = polar_field_from_function(
        annulus, lambda r, th: np.sin(th) * np.exp(-((r - 0.4) ** 2) / 0.02)
    )
    out = step_polar(f, q=1.5, diff=Isotropic(0.0), dt=0.7)
    assert out.l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)


def test_anisotropic_step_stable_and_dissipative(annulus):
    f = polar_field_from_function(
        annulus, lambda r, th: np.sin(th) * np.exp(-((r - 0.4) ** 2) / 0.02)
    )
    diff = AnisotropicRadial(kappa=0.05, gamma=1.0)
    out = step_polar(f, q=1.0, diff=diff, dt=0.1)
    assert np.all(np.isfinite(out.values))
    assert out.l2_norm() < f.l2_norm()


def test_invalid_dt_rejected(annulus):
    f = polar_field_from_function(annulus, lambda r, th: np.sin(th))
    with pytest.raises(ConfigError):
        step_polar(f, q=1.0, diff=Isotropic(0.01), dt=0.0)


def test_polar_energy_ledger_residual_small(annulus):
    # gamma = 0: trapezoid dissipation from FD gradients closes the balance
    kappa, dt, n = 0.01, 0.02, 50
    f = polar_field_from_function(
        annulus, lambda r, th: np.sin(th) * np.exp(-((r - 0.5) ** 2) / 0.03)
    )
    ledger = EnergyLedger.start(f, kappa)
    stepper = PolarStepper(annulus, 1.0, Isotropic(kappa), dt)
    for _ in range(n):
        f = stepper.step(f)
        ledger.record(f, kappa)
    assert abs(ledger.residual[-1]) / ledger.l2sq[0] <= 0.02
