"""Velocity fields and diffusivity models.

All velocity variants are divergence-free: the shear profiles depend only
on ``y`` and push along ``x``, while the circular flow is a pure rotation
whose angular speed depends only on the radius.

The circular variant stores the angular advection speed ``r**q`` (the
coefficient of the polar d/dtheta term); its linear velocity vector is
``r**q * (-y, x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, UnsupportedVariantError


@dataclass(frozen=True)
class Zero:
    """No flow; pure diffusion."""


@dataclass(frozen=True)
class ConstantShear:
    """u(x, y) = (s*y, 0), the linear-shear oracle case (n = 1)."""

    s: float = 1.0


@dataclass(frozen=True)
class PowerShear:
    """u(x, y) = (y**n, 0) with a critical point of order n at y = 0.

    Derivatives vanish through order n-1 and the n-th derivative equals n!.
    """

    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"power-shear order must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class HolderShear:
    """u(x, y) = (c*sign(y)*|y|**alpha, 0), odd and continuous through y = 0.

    ``c`` is the profile amplitude.  Because the profile is odd, the sharp
    Hölder constant over pairs straddling 0 is ``2**(1-alpha) * c`` (attained
    at y' = -y); it is exposed as ``holder_constant``.
    """

    alpha: float = 0.5
    c: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.c <= 0.0:
            raise ValueError(f"Hölder amplitude must be positive, got {self.c}")

    @property
    def holder_constant(self) -> float:
        return 2.0 ** (1.0 - self.alpha) * self.c


@dataclass(frozen=True)
class Circular:
    """Rotation with angular speed r**q (coefficient of d/dtheta)."""

    q: float = 1.0

    def __post_init__(self):
        if self.q <= 0.0:
            raise ValueError(f"circular exponent q must be positive, got {self.q}")


VelocityField = Union[Zero, ConstantShear, PowerShear, HolderShear, Circular]

SHEAR_VARIANTS = (Zero, ConstantShear, PowerShear, HolderShear)


@dataclass(frozen=True)
class Isotropic:
    """Constant diffusivity kappa; kappa = 0 is the deterministic limit."""

    kappa: float

    def __post_init__(self):
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {self.kappa}")


@dataclass(frozen=True)
class AnisotropicRadial:
    """Local diffusivity kappa * r**gamma; only meaningful on annular domains."""

    kappa: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {self.kappa}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


DiffusivityModel = Union[Isotropic, AnisotropicRadial]


def is_shear(field: VelocityField) -> bool:
    return isinstance(field, SHEAR_VARIANTS)


def shear_profile(field: VelocityField, y):
    """Vectorized shear speed u_x(y) for the 1D shear variants."""
    y = np.asarray(y, dtype=np.float64)
    if isinstance(field, Zero):
        return np.zeros_like(y)
    if isinstance(field, ConstantShear):
        return field.s * y
    if isinstance(field, PowerShear):
        return y ** field.n
    if isinstance(field, HolderShear):
        return field.c * np.sign(y) * np.abs(y) ** field.alpha
    raise UnsupportedVariantError(f"{type(field).__name__} is not a shear flow")


def angular_speed(field: Circular, r):
    """d(theta)/dt = r**q for the circular variant."""
    if not isinstance(field, Circular):
        raise UnsupportedVariantError(f"{type(field).__name__} has no angular speed")
    return np.asarray(r, dtype=np.float64) ** field.q


def eval_velocity(field: VelocityField, point) -> tuple[float, float]:
    """Exact pointwise velocity at a 2D coordinate.

    Raises ``DomainError`` for the circular variant at r <= 0.
    """
    x, y = float(point[0]), float(point[1])
    if isinstance(field, Circular):
        r = math.hypot(x, y)
        if r <= 0.0:
            raise DomainError("circular flow is undefined at r <= 0")
        speed = r ** field.q
        return (-speed * y, speed * x)
    ux = float(shear_profile(field, y))
    return (ux, 0.0)


def eval_diffusivity(model: DiffusivityModel, point) -> float:
    """Local diffusivity at a point (2D coordinate) or at a plain radius."""
    if isinstance(model, Isotropic):
        return model.kappa
    p = np.asarray(point, dtype=np.float64)
    r = float(np.hypot(p[0], p[1])) if p.ndim >= 1 and p.size == 2 else float(p)
    if r < 0.0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r == 0.0 and model.gamma > 0.0:
        return 0.0
    return model.kappa * r ** model.gamma


def local_kappa(model: DiffusivityModel, positions: np.ndarray) -> np.ndarray:
    """Vectorized diffusivity over an (N, 2) position array."""
    if isinstance(model, Isotropic):
        return np.full(positions.shape[0], model.kappa)
    r = np.hypot(positions[:, 0], positions[:, 1])
    return model.kappa * r ** model.gamma


@dataclass(frozen=True)
class HolderCheck:
    max_ratio: float
    holds: bool


def verify_holder(field: HolderShear, interval, samples: int, seed: int) -> HolderCheck:
    """Sample pairs in ``interval`` and bound the empirical Hölder ratio.

    ``holds`` compares the largest ratio |u(y)-u(y')| / |y-y'|**alpha against
    the variant's sharp constant ``holder_constant`` (with a 1e-12 slack).
    """
    if not isinstance(field, HolderShear):
        raise UnsupportedVariantError(
            f"verify_holder needs a HolderShear flow, got {type(field).__name__}"
        )
    if samples < 2:
        raise ValueError("need at least two sample points")
    lo, hi = float(interval[0]), float(interval[1])
    gen = np.random.Generator(np.random.PCG64(seed))
    ya = gen.uniform(lo, hi, size=samples)
    yb = gen.uniform(lo, hi, size=samples)
    keep = ya != yb
    ya, yb = ya[keep], yb[keep]
    num = np.abs(shear_profile(field, ya) - shear_profile(field, yb))
    den = np.abs(ya - yb) ** field.alpha
    max_ratio = float(np.max(num / den))
    return HolderCheck(max_ratio=max_ratio, holds=max_ratio <= field.holder_constant * (1.0 + 1e-12))
