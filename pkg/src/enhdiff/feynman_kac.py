"""Density and variance estimators over stochastic trajectory ensembles.

``estimate_density`` realizes the probabilistic solution formula
rho(t, x) = E[rho0(X_t(x))] where X is the backward process (simulated as a
forward run with reversed drift; see ``stochastic``).  The integrated
variance of rho0 along trajectories, halved, equals the accumulated
gradient dissipation of the deterministic solution — the central
cross-check between the Monte Carlo and grid solvers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import EstimatorError
from .flows import DiffusivityModel, VelocityField
from .stochastic import SdeConfig, TrajectoryEnsemble, evolve_positions


@dataclass(frozen=True)
class PointEstimate:
    mean: float
    standard_error: float
    n_samples: int


@dataclass(frozen=True)
class VarianceEstimate:
    variance: float
    standard_error: float
    n_samples: int


@dataclass(frozen=True)
class IntegratedVariance:
    value: float
    standard_error: float
    time: float


@dataclass(frozen=True)
class QuadratureGrid:
    """Evaluation points with weights summing to the domain measure."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.points.shape[0] != self.weights.shape[0]:
            raise ValueError("points and weights must have matching lengths")

    @property
    def n_nodes(self) -> int:
        return self.points.shape[0]


def torus_quadrature(nx: int, ny: int, ly: float = math.pi) -> QuadratureGrid:
    """Uniform rectangle rule on [0,2pi) x [-ly, ly); spectrally accurate
    for smooth periodic integrands."""
    xs = np.arange(nx) * (2.0 * np.pi / nx)
    ys = -ly + np.arange(ny) * (2.0 * ly / ny)
    pts = np.array([(x, y) for x in xs for y in ys])
    w = np.full(nx * ny, (2.0 * np.pi / nx) * (2.0 * ly / ny))
    return QuadratureGrid(points=pts, weights=w)


def strip_quadrature(nx: int, y_lo: float, y_hi: float, ny: int) -> QuadratureGrid:
    """Rectangle rule in x crossed with a trapezoid rule on [y_lo, y_hi]."""
    xs = np.arange(nx) * (2.0 * np.pi / nx)
    ys = np.linspace(y_lo, y_hi, ny)
    wy = np.full(ny, (y_hi - y_lo) / (ny - 1))
    wy[0] *= 0.5
    wy[-1] *= 0.5
    pts = np.array([(x, y) for x in xs for y in ys])
    w = np.array([(2.0 * np.pi / nx) * wyj for _ in xs for wyj in wy])
    return QuadratureGrid(points=pts, weights=w)


@dataclass(frozen=True)
class VarianceField:
    """Per-node trajectory variances of rho0 with standard errors."""

    points: np.ndarray
    weights: np.ndarray
    variances: np.ndarray
    standard_errors: np.ndarray
    n_samples: int
    time: float


def _variance_from_moments(s1, s2, s3, s4, n):
    """Unbiased variance and its standard error from raw power sums."""
    mean = s1 / n
    m2 = s2 / n - mean ** 2
    m4 = (s4 - 4 * mean * s3 + 6 * mean ** 2 * s2) / n - 3 * mean ** 4
    m2 = np.maximum(m2, 0.0)
    m4 = np.maximum(m4, 0.0)
    var = np.maximum(n / (n - 1) * m2, 0.0)
    se = np.sqrt(np.maximum(m4 - (n - 3) / (n - 1) * m2 ** 2, 0.0) / n)
    return var, se


def estimate_density(rho0, ensemble: TrajectoryEnsemble) -> PointEstimate:
    """Sample mean of rho0 over the ensemble's terminal points."""
    if ensemble.n_samples < 1:
        raise EstimatorError("empty ensemble")
    vals = np.asarray(rho0(ensemble.terminal_points), dtype=np.float64)
    n = vals.size
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return PointEstimate(mean=mean, standard_error=se, n_samples=n)


def estimate_variance(rho0, ensemble: TrajectoryEnsemble) -> VarianceEstimate:
    """Unbiased sample variance of rho0 over the ensemble (N-1 denominator)."""
    if ensemble.n_samples < 2:
        raise EstimatorError("variance needs at least two samples")
    vals = np.asarray(rho0(ensemble.terminal_points), dtype=np.float64)
    n = vals.size
    var, se = _variance_from_moments(
        vals.sum(), (vals ** 2).sum(), (vals ** 3).sum(), (vals ** 4).sum(), n
    )
    return VarianceEstimate(variance=float(var), standard_error=float(se), n_samples=n)


def variance_field_ladder(
    rho0,
    field: VelocityField,
    diff: DiffusivityModel,
    domain_grid: QuadratureGrid,
    cfg: SdeConfig,
    n_samples: int,
    seed: int,
    times=None,
) -> list[VarianceField]:
    """Per-node variance of rho0(X_t) at each requested time.

    One ensemble per node, with node seeds mix(seed, node) and sample seeds
    mix(node_seed, i); all nodes advance together through a shared schedule
    so a whole time ladder costs a single sweep of the trajectories.
    """
    if domain_grid.n_nodes < 1:
        raise EstimatorError("empty quadrature grid")
    if n_samples < 2:
        raise EstimatorError("variance needs at least two samples")
    times = [cfg.t_final] if times is None else list(times)
    n_nodes = domain_grid.n_nodes
    node_keys = rng.mix(seed, np.arange(n_nodes))
    keys = rng.mix(np.repeat(node_keys, n_samples), np.tile(np.arange(n_samples), n_nodes))
    pos = np.repeat(domain_grid.points, n_samples, axis=0).astype(np.float64)

    results: list[VarianceField] = []

    def observe(t, positions):
        vals = np.asarray(rho0(positions), dtype=np.float64).reshape(n_nodes, n_samples)
        var, se = _variance_from_moments(
            vals.sum(axis=1),
            (vals ** 2).sum(axis=1),
            (vals ** 3).sum(axis=1),
            (vals ** 4).sum(axis=1),
            n_samples,
        )
        results.append(
            VarianceField(
                points=domain_grid.points,
                weights=domain_grid.weights,
                variances=var,
                standard_errors=se,
                n_samples=n_samples,
                time=t,
            )
        )

    evolve_positions(
        field, diff, pos, keys, cfg,
        reverse_drift=True, snapshot_times=times, observe=observe,
    )
    return results


def integrate_variance_field(vf: VarianceField) -> IntegratedVariance:
    """Half the quadrature integral of the variance field, with propagated SE."""
    value = 0.5 * float(np.dot(vf.weights, vf.variances))
    se = 0.5 * float(np.sqrt(np.dot(vf.weights ** 2, vf.standard_errors ** 2)))
    return IntegratedVariance(value=value, standard_error=se, time=vf.time)


def integrated_variance(
    rho0,
    field: VelocityField,
    diff: DiffusivityModel,
    domain_grid: QuadratureGrid,
    cfg: SdeConfig,
    n_samples: int,
    seed: int,
) -> IntegratedVariance:
    """(1/2) * integral of Var(rho0(X_t(x))) dx — the dissipation proxy."""
    vf = variance_field_ladder(rho0, field, diff, domain_grid, cfg, n_samples, seed)[-1]
    return integrate_variance_field(vf)


def integrated_variance_ladder(
    rho0,
    field: VelocityField,
    diff: DiffusivityModel,
    domain_grid: QuadratureGrid,
    cfg: SdeConfig,
    n_samples: int,
    seed: int,
    times,
) -> list[IntegratedVariance]:
    fields = variance_field_ladder(
        rho0, field, diff, domain_grid, cfg, n_samples, seed, times=times
    )
    return [integrate_variance_field(vf) for vf in fields]
