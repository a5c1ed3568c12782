"""Regularized-delta interface machinery: kernel evaluation, sampling a
grid field at interface markers, and the adjoint spreading operator.

Two kernels are available.  The cosine kernel delta_eps(r) =
(1 + cos(pi r / eps)) / (2 eps) has exact unit mass, and its discrete sums
on a uniform grid reproduce unit mass exactly whenever eps is an integer
multiple of the spacing (its Fourier transform vanishes at every nonzero
multiple of 2 pi / h).  Its discrete *first* moment is only O(h), so
sampling smooth fields through it converges at first order.  The
four-point kernel (support eps = 2h) enforces the discrete zeroth and
first moment identities exactly and is the right choice when second-order
sampling accuracy matters; both peak at 1/eps.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GeometryError
from .grid import CartesianGrid, ScalarField


@dataclass(frozen=True)
class RegularizedDelta:
    """Regularized delta with support half-width eps."""

    epsilon: float
    kernel: str = "cosine"

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.kernel not in ("cosine", "four-point"):
            raise ConfigError(f"unknown kernel {self.kernel!r}")


def _phi4(s: np.ndarray) -> np.ndarray:
    s = np.abs(s)
    inner = (3.0 - 2.0 * s + np.sqrt(np.maximum(1.0 + 4.0 * s - 4.0 * s * s, 0.0))) / 8.0
    outer = (5.0 - 2.0 * s - np.sqrt(np.maximum(-7.0 + 12.0 * s - 4.0 * s * s, 0.0))) / 8.0
    return np.where(s > 2.0, 0.0, np.where(s < 1.0, inner, outer))


def delta_eval(delta: RegularizedDelta, r):
    """Kernel value at 1D offset(s) r; zero outside [-eps, eps]."""
    r = np.asarray(r, dtype=np.float64)
    eps = delta.epsilon
    if delta.kernel == "cosine":
        inside = np.abs(r) <= eps
        vals = np.where(inside, (1.0 + np.cos(np.pi * r / eps)) / (2.0 * eps), 0.0)
    else:
        h = 0.5 * eps
        vals = _phi4(r / h) / h
    if vals.ndim == 0:
        return float(vals)
    return vals


@dataclass(frozen=True)
class Interface:
    """Ordered marker points with positive arc-length weights."""

    markers: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        markers = np.asarray(self.markers, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if markers.ndim != 2 or markers.shape[1] != 2:
            raise ConfigError("markers must be an (n, 2) array")
        if weights.shape != (markers.shape[0],) or np.any(weights <= 0):
            raise ConfigError("weights must be positive, one per marker")
        object.__setattr__(self, "markers", markers)
        object.__setattr__(self, "weights", weights)

    @property
    def n_markers(self) -> int:
        return self.markers.shape[0]

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))


def circle_interface(center, radius: float, n_markers: int) -> Interface:
    """Equispaced markers on a circle with exact arc-length weights."""
    th = np.arange(n_markers) * (2.0 * math.pi / n_markers)
    pts = np.stack(
        [center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1
    )
    w = np.full(n_markers, 2.0 * math.pi * radius / n_markers)
    return Interface(markers=pts, weights=w)


def load_interface_csv(path) -> Interface:
    """Read markers from rows of x,y,dS (a leading header row is allowed)."""
    pts, ws = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                x, y, ds = float(row[0]), float(row[1]), float(row[2])
            except ValueError:
                continue  # header
            pts.append((x, y))
            ws.append(ds)
    if not pts:
        raise ConfigError(f"no marker rows found in {path}")
    return Interface(markers=np.array(pts), weights=np.array(ws))


def _check_resolution(delta: RegularizedDelta, grid: CartesianGrid) -> None:
    if delta.epsilon < 2.0 * max(grid.dx, grid.dy) * (1.0 - 1e-12):
        raise ConfigError(
            f"epsilon={delta.epsilon} under-resolves the grid; need >= 2*max(dx, dy)"
        )


def _check_seam(iface: Interface, delta: RegularizedDelta, grid: CartesianGrid) -> None:
    eps = delta.epsilon
    x = iface.markers[:, 0]
    y = iface.markers[:, 1]
    bad = (x < eps) | (x > 2.0 * math.pi - eps) | (np.abs(y) > grid.ly - eps)
    if np.any(bad):
        raise GeometryError(
            f"{int(np.sum(bad))} marker(s) within epsilon of the domain seam "
            "and periodic wrap is disabled"
        )


def _stencil(iface: Interface, delta: RegularizedDelta, grid: CartesianGrid):
    """Index windows and per-direction kernel weights for every marker."""
    eps = delta.epsilon
    mx = int(math.ceil(eps / grid.dx)) + 1
    my = int(math.ceil(eps / grid.dy)) + 1
    xk = iface.markers[:, 0]
    yk = iface.markers[:, 1]
    ix0 = np.floor((xk - eps) / grid.dx).astype(np.int64)
    iy0 = np.floor((yk - eps - (-grid.ly)) / grid.dy).astype(np.int64)
    ax = ix0[:, None] + np.arange(2 * mx + 1)[None, :]
    ay = iy0[:, None] + np.arange(2 * my + 1)[None, :]
    wx = delta_eval(delta, ax * grid.dx - xk[:, None])
    wy = delta_eval(delta, (-grid.ly + ay * grid.dy) - yk[:, None])
    return ax % grid.nx, ay % grid.ny, wx, wy


def interface_sample(
    fieldval: ScalarField,
    iface: Interface,
    delta: RegularizedDelta,
    periodic: bool = True,
) -> np.ndarray:
    """Sample the field at the markers: sum over nodes of
    delta(x_node - X_k) * rho * dx * dy, one value per marker."""
    grid = fieldval.grid
    _check_resolution(delta, grid)
    if not periodic:
        _check_seam(iface, delta, grid)
    ax, ay, wx, wy = _stencil(iface, delta, grid)
    patch = fieldval.values[ax[:, :, None], ay[:, None, :]]
    vals = np.einsum("ka,kb,kab->k", wx, wy, patch)
    return vals * grid.cell_area


def spread(
    marker_values,
    iface: Interface,
    delta: RegularizedDelta,
    grid: CartesianGrid,
    periodic: bool = True,
) -> np.ndarray:
    """Adjoint of ``interface_sample``: stamp marker values (times dS_k)
    onto the grid.  Returns the field increment array."""
    _check_resolution(delta, grid)
    if not periodic:
        _check_seam(iface, delta, grid)
    v = np.asarray(marker_values, dtype=np.float64)
    if v.shape != (iface.n_markers,):
        raise ConfigError("need one value per marker")
    ax, ay, wx, wy = _stencil(iface, delta, grid)
    stamp = wx[:, :, None] * wy[:, None, :] * (v * iface.weights)[:, None, None]
    out = np.zeros((grid.nx, grid.ny))
    np.add.at(out, (ax[:, :, None], ay[:, None, :]), stamp)
    return out
