"""Euler-Maruyama trajectories and two-particle statistics.

The trajectory law follows dX = u(X) ds + sqrt(2*kappa_local(X)) dB with a
standard-normal increment per step drawn from a counter-based stream keyed
by (seed, step).  ``reverse_drift=True`` runs the pullback convention
(drift -u) that turns a forward run into the backward process whose
terminal law feeds the Feynman-Kac estimators.

On Cartesian shear domains positions wrap periodically in x and are
unbounded in y.  Circular-flow trajectories are integrated in Cartesian
coordinates (so the noise stays isotropic without polar Itô corrections)
with a reflecting barrier at r = 1e-6 guarding the coordinate singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng
from .errors import ConfigError, UnsupportedVariantError
from .flows import (
    Circular,
    DiffusivityModel,
    VelocityField,
    angular_speed,
    is_shear,
    local_kappa,
    shear_profile,
)

TWO_PI = 2.0 * np.pi
R_FLOOR = 1e-6

# Noise amplitude convention of the trajectory SDE.  sqrt(2*kappa) is the
# unique choice for which the Feynman-Kac expectation solves the
# advection-diffusion equation; tests monkeypatch this to inject the wrong
# amplitude and confirm the duality cross-check catches it.
def _noise_amplitude(kappa_local: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0 * kappa_local)


class Coupling(Enum):
    INDEPENDENT_NOISE = "independent-noise"
    COMMON_NOISE = "common-noise"


@dataclass(frozen=True)
class SdeConfig:
    """Time stepping for Euler-Maruyama runs.

    Steps are ceil(t_final/dt) long with the final partial step shortened so
    the step sizes sum exactly to t_final.
    """

    dt: float
    t_final: float
    scheme: str = "euler-maruyama"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_final <= 0.0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.dt > self.t_final:
            raise ConfigError(f"dt={self.dt} exceeds t_final={self.t_final}")
        if self.scheme != "euler-maruyama":
            raise ConfigError(f"unknown scheme {self.scheme!r}")

    def n_steps(self) -> int:
        return int(math.ceil(self.t_final / self.dt - 1e-12))

    def step_sizes(self) -> np.ndarray:
        n = self.n_steps()
        sizes = np.full(n, self.dt)
        sizes[-1] = self.t_final - (n - 1) * self.dt
        return sizes


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Terminal positions of N seeded trajectories started at one point."""

    start_point: tuple[float, float]
    terminal_points: np.ndarray
    base_seed: int

    @property
    def n_samples(self) -> int:
        return self.terminal_points.shape[0]


@dataclass(frozen=True)
class SeparationEstimate:
    value: float
    standard_error: float
    n_pairs: int
    coupling: Coupling


def _apply_drift(field: VelocityField, pos: np.ndarray, h_signed: float) -> None:
    """Advance positions along the exact drift flow for time ``h_signed``.

    Every variant's drift flow has a closed form: shears translate x by
    u(y) * h (y is constant along the drift), and circular flows rotate by
    angle r**q * h (r is constant along the drift).  For shears this is
    bit-identical to the literal Euler increment; for rotations the literal
    increment spirals outward unconditionally, while the exact map keeps
    the radius invariant at the same weak order.
    """
    if isinstance(field, Circular):
        r = np.hypot(pos[:, 0], pos[:, 1])
        ang = angular_speed(field, r) * h_signed
        c, s = np.cos(ang), np.sin(ang)
        x = pos[:, 0] * c - pos[:, 1] * s
        pos[:, 1] = pos[:, 0] * s + pos[:, 1] * c
        pos[:, 0] = x
    else:
        pos[:, 0] += h_signed * shear_profile(field, pos[:, 1])


def _apply_geometry(field: VelocityField, pos: np.ndarray, wrap_x: bool) -> None:
    if isinstance(field, Circular):
        r = np.hypot(pos[:, 0], pos[:, 1])
        bad = r < R_FLOOR
        if np.any(bad):
            rb = np.maximum(r[bad], 0.25 * R_FLOOR)
            pos[bad] *= ((2.0 * R_FLOOR - rb) / rb)[:, None]
    elif wrap_x:
        pos[:, 0] %= TWO_PI


def evolve_positions(
    field: VelocityField,
    diff: DiffusivityModel,
    pos: np.ndarray,
    keys: np.ndarray,
    cfg: SdeConfig,
    reverse_drift: bool = False,
    snapshot_times=None,
    observe=None,
    wrap_x: bool = True,
) -> np.ndarray:
    """Advance (N, 2) positions in place through the configured schedule.

    When ``snapshot_times`` is given, the step schedule is split so each
    snapshot time is hit exactly and ``observe(t, pos)`` is called there.
    The step counter advances once per sub-step, so results depend only on
    (keys, cfg, snapshot_times), never on batching.  ``wrap_x=False`` keeps
    shear trajectories on the covering plane (used by separation statistics,
    which measure plane distances).
    """
    sign = -1.0 if reverse_drift else 1.0
    if snapshot_times is None:
        segments = [(cfg.t_final, cfg.step_sizes())]
    else:
        segments = []
        prev = 0.0
        for t in snapshot_times:
            if t < prev - 1e-12:
                raise ConfigError("snapshot times must be nondecreasing")
            span = t - prev
            if span > 1e-12:
                seg = SdeConfig(dt=min(cfg.dt, span), t_final=span)
                segments.append((t, seg.step_sizes()))
            else:
                segments.append((t, np.empty(0)))
            prev = t
    counter = 0
    for t_end, sizes in segments:
        for h in sizes:
            z1, z2 = rng.normal_pair(keys, counter)
            counter += 1
            amp = _noise_amplitude(local_kappa(diff, pos)) * math.sqrt(h)
            _apply_drift(field, pos, sign * h)
            pos[:, 0] += amp * z1
            pos[:, 1] += amp * z2
            _apply_geometry(field, pos, wrap_x)
        if observe is not None:
            observe(t_end, pos)
    return pos


def simulate_trajectory(
    field: VelocityField,
    diff: DiffusivityModel,
    x0,
    cfg: SdeConfig,
    seed: int,
    reverse_drift: bool = False,
) -> np.ndarray:
    """Terminal position of a single trajectory keyed directly by ``seed``."""
    pos = np.array([[float(x0[0]), float(x0[1])]])
    keys = np.asarray([seed], dtype=np.uint64)
    evolve_positions(field, diff, pos, keys, cfg, reverse_drift)
    return pos[0].copy()


def simulate_ensemble(
    field: VelocityField,
    diff: DiffusivityModel,
    x0,
    cfg: SdeConfig,
    base_seed: int,
    n_samples: int,
    reverse_drift: bool = False,
) -> TrajectoryEnsemble:
    """N independent trajectories; sample i uses derived seed mix(base_seed, i)."""
    if n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {n_samples}")
    pos = np.tile(np.asarray(x0, dtype=np.float64), (n_samples, 1))
    keys = rng.mix(base_seed, np.arange(n_samples))
    evolve_positions(field, diff, pos, keys, cfg, reverse_drift)
    return TrajectoryEnsemble(
        start_point=(float(x0[0]), float(x0[1])),
        terminal_points=pos,
        base_seed=base_seed,
    )


def _mean_with_se(samples: np.ndarray) -> tuple[float, float]:
    n = samples.size
    mean = float(np.mean(samples))
    if n < 2:
        return mean, 0.0
    se = float(np.std(samples, ddof=1) / math.sqrt(n))
    return mean, se


def two_point_separation(
    field: VelocityField,
    diff: DiffusivityModel,
    x,
    y,
    cfg: SdeConfig,
    coupling: Coupling,
    n_pairs: int,
    seed: int,
) -> SeparationEstimate:
    """Monte Carlo estimate of E|X_t(x) - X_t(y)|^2 for two released particles.

    COMMON_NOISE reuses one Brownian path for both particles of a pair;
    INDEPENDENT_NOISE gives each its own.
    """
    if n_pairs < 1:
        raise ConfigError(f"n_pairs must be >= 1, got {n_pairs}")
    coupling = Coupling(coupling)
    pair_keys = rng.mix(seed, np.arange(n_pairs))
    keys_a = rng.mix(pair_keys, 1)
    keys_b = keys_a if coupling is Coupling.COMMON_NOISE else rng.mix(pair_keys, 2)
    pos_a = np.tile(np.asarray(x, dtype=np.float64), (n_pairs, 1))
    pos_b = np.tile(np.asarray(y, dtype=np.float64), (n_pairs, 1))
    # separations live on the covering plane, so x stays unwrapped here
    evolve_positions(field, diff, pos_a, keys_a, cfg, wrap_x=False)
    evolve_positions(field, diff, pos_b, keys_b, cfg, wrap_x=False)
    delta = pos_a - pos_b
    sq = delta[:, 0] ** 2 + delta[:, 1] ** 2
    value, se = _mean_with_se(sq)
    return SeparationEstimate(value=value, standard_error=se, n_pairs=n_pairs, coupling=coupling)


def shear_increment_functional(
    field: VelocityField,
    kappa: float,
    y: float,
    cfg: SdeConfig,
    n_pairs: int,
    seed: int,
) -> SeparationEstimate:
    """Mean square of the time-integrated shear difference along two Brownian paths.

    Estimates E | integral_0^t ( u(y + sqrt(2k) W1_s) - u(y + sqrt(2k) W2_s) ) ds |^2
    with left-endpoint quadrature on the SDE's own dt grid (W starts at 0).
    """
    if not is_shear(field):
        raise UnsupportedVariantError(
            f"shear increment functional needs a 1D shear, got {type(field).__name__}"
        )
    if n_pairs < 1:
        raise ConfigError(f"n_pairs must be >= 1, got {n_pairs}")
    keys = rng.mix(seed, np.arange(n_pairs))
    w1 = np.zeros(n_pairs)
    w2 = np.zeros(n_pairs)
    acc = np.zeros(n_pairs)
    scale = math.sqrt(2.0 * kappa)
    for counter, h in enumerate(cfg.step_sizes()):
        acc += h * (
            shear_profile(field, y + scale * w1) - shear_profile(field, y + scale * w2)
        )
        z1, z2 = rng.normal_pair(keys, counter)
        root = math.sqrt(h)
        w1 += root * z1
        w2 += root * z2
    value, se = _mean_with_se(acc ** 2)
    return SeparationEstimate(
        value=value,
        standard_error=se,
        n_pairs=n_pairs,
        coupling=Coupling.INDEPENDENT_NOISE,
    )
