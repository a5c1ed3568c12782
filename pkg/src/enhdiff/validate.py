"""Built-in oracle suite: fast closed-form checks that exercise every
solver path.  ``enhdiff validate`` runs these and reports pass/fail; the
test suite reuses them, including a mutation check that breaks the noise
amplitude and expects the duality oracle to catch it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import feynman_kac as fk
from . import ibm
from . import rng
from .flows import ConstantShear, Isotropic, Zero
from .grid import CartesianGrid, EnergyLedger, field_from_function, step_strang
from .stochastic import SdeConfig, simulate_ensemble


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str


def check_heat_decay_grid(nx: int = 128, seed: int = 0) -> CheckResult:
    """Zero flow, rho0 = sin x, kappa=0.1, t=1: norm ratio is exactly e^-0.1."""
    kappa, t_final, dt = 0.1, 1.0, 0.05
    grid = CartesianGrid(nx, nx, ly=math.pi)
    field = field_from_function(grid, lambda x, y: np.sin(x))
    n0 = field.l2_norm()
    for _ in range(int(round(t_final / dt))):
        field = step_strang(field, Zero(), kappa, dt)
    measured = field.l2_norm() / n0
    target = math.exp(-kappa * t_final)
    err = abs(measured - target)
    return CheckResult(
        name="heat-decay-grid",
        passed=err <= 1e-6,
        measured=err,
        tolerance=1e-6,
        detail=f"norm ratio {measured:.9f} vs e^-0.1 = {target:.9f}",
    )


def check_heat_decay_mc(n_samples: int = 100_000, seed: int = 7) -> CheckResult:
    """Pointwise density at 8 probes matches e^-kt sin x within 3 SE."""
    kappa, t_final = 0.1, 1.0
    cfg = SdeConfig(dt=0.01, t_final=t_final)
    diff = Isotropic(kappa)
    worst = 0.0
    for i in range(8):
        x = 2.0 * math.pi * i / 8.0
        ens = simulate_ensemble(
            Zero(), diff, (x, 0.0), cfg, rng.mix(seed, i), n_samples, reverse_drift=True
        )
        est = fk.estimate_density(lambda p: np.sin(p[:, 0]), ens)
        target = math.exp(-kappa * t_final) * math.sin(x)
        pull = abs(est.mean - target) / max(est.standard_error, 1e-300)
        worst = max(worst, pull)
    return CheckResult(
        name="heat-decay-mc",
        passed=worst <= 3.0,
        measured=worst,
        tolerance=3.0,
        detail=f"worst probe deviation {worst:.2f} standard errors",
    )


def check_linear_shear_closed_form(seed: int = 0) -> CheckResult:
    """Mode amplitude under u=(y,0) decays as exp(-k(t + t^3/3)) to 1%."""
    kappa, t_final, dt = 1e-3, 10.0, 0.01
    grid = CartesianGrid(256, 256, ly=math.pi)
    field = field_from_function(grid, lambda x, y: np.sin(x))
    flow = ConstantShear(1.0)
    ledger = EnergyLedger.start(field, kappa)
    for _ in range(int(round(t_final / dt))):
        field = step_strang(field, flow, kappa, dt, ledger=ledger)
    row = field.values[:, grid.ny // 2]  # y = 0 row, clean of the seam layer
    amp = 2.0 * abs(np.fft.rfft(row)[1]) / grid.nx
    target = math.exp(-kappa * (t_final + t_final ** 3 / 3.0))
    rel = abs(amp - target) / target
    residual = abs(ledger.residual[-1]) / ledger.l2sq[0]
    passed = rel <= 0.01 and residual <= 0.01
    return CheckResult(
        name="linear-shear-closed-form",
        passed=passed,
        measured=rel,
        tolerance=0.01,
        detail=f"amplitude rel err {rel:.2e}; energy residual {residual:.2e}",
    )


def zero_field_duality_closed_form(kappa: float, t: float) -> float:
    """(1/2) integral over T^2 of Var(sin(X_t(x))) = pi^2 (1 - e^(-2 k t)).

    Equals the accumulated dissipation k * int_0^t ||grad rho||^2 ds of
    rho(t) = e^(-k t) sin x; both sides were derived by direct Gaussian
    integration and cross-checked in the test suite.
    """
    return math.pi ** 2 * (1.0 - math.exp(-2.0 * kappa * t))


def check_duality(n_samples: int = 10_000, seed: int = 11) -> CheckResult:
    """MC integrated variance against the closed-form dissipation, 3 SE."""
    kappa, t_final = 0.1, 1.0
    quad = fk.torus_quadrature(8, 4, ly=math.pi)  # 32 nodes
    cfg = SdeConfig(dt=0.01, t_final=t_final)
    iv = fk.integrated_variance(
        lambda p: np.sin(p[:, 0]), Zero(), Isotropic(kappa), quad, cfg, n_samples, seed
    )
    target = zero_field_duality_closed_form(kappa, t_final)
    pull = abs(iv.value - target) / max(iv.standard_error, 1e-300)
    return CheckResult(
        name="variance-dissipation-duality",
        passed=pull <= 3.0,
        measured=pull,
        tolerance=3.0,
        detail=f"value {iv.value:.5f} vs closed form {target:.5f} ({pull:.2f} SE)",
    )


def check_delta_kernel(seed: int = 3) -> CheckResult:
    """Partition of unity and sample/spread adjointness at 1e-12."""
    from .grid import ScalarField

    grid = CartesianGrid(64, 64, ly=math.pi)
    delta = ibm.RegularizedDelta(epsilon=2.0 * grid.dx)
    gen = np.random.Generator(np.random.PCG64(seed))
    markers = np.stack(
        [gen.uniform(0, 2 * math.pi, 100), gen.uniform(-math.pi, math.pi, 100)], axis=1
    )
    iface = ibm.Interface(markers=markers, weights=np.full(100, 0.1))
    const = ScalarField(grid, np.ones((grid.nx, grid.ny)))
    pou_err = float(np.max(np.abs(ibm.interface_sample(const, iface, delta) - 1.0)))
    rho = ScalarField(grid, gen.standard_normal((grid.nx, grid.ny)))
    v = gen.standard_normal(100)
    lhs = float(np.sum(ibm.spread(v, iface, delta, grid) * rho.values) * grid.cell_area)
    rhs = float(np.dot(v * iface.weights, ibm.interface_sample(rho, iface, delta)))
    adj_err = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    err = max(pou_err, adj_err)
    return CheckResult(
        name="delta-partition-of-unity",
        passed=err <= 1e-12,
        measured=err,
        tolerance=1e-12,
        detail=f"partition-of-unity {pou_err:.2e}, adjointness {adj_err:.2e}",
    )


ALL_CHECKS = {
    "heat-decay-grid": check_heat_decay_grid,
    "heat-decay-mc": check_heat_decay_mc,
    "linear-shear-closed-form": check_linear_shear_closed_form,
    "variance-dissipation-duality": check_duality,
    "delta-partition-of-unity": check_delta_kernel,
}


def run_all(selected=None):
    results = []
    for name, fn in ALL_CHECKS.items():
        if selected and name not in selected:
            continue
        results.append(fn())
    return results
