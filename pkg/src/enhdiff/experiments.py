"""Mixing-time experiments: the localized initial data, kappa sweeps,
log-log scaling fits, and the predicted exponents they are compared to.

Initial data families
---------------------
* tent-shear: rho0(x, y) = max(kappa^beta - |y|, 0) * sin(x), peaked at the
  shear's critical point, with beta = 1/(n+2) (or 1/(alpha+2), 1/3 for the
  linear oracle).
* annulus-circular: rho0(r, theta) = max(kappa^beta - |r - 3 kappa^beta|, 0)
  * sin(theta), supported on [2 kappa^beta, 4 kappa^beta], beta = 1/(q+2).
* sine-x: rho0 = sin x, the global heat-decay oracle.

The mixing time T is the first step-ladder time at which the relative L2
norm falls to theta_mix (default 1/e); runs that hit the horizon first are
censored and excluded from fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from . import feynman_kac as fk
from . import rng
from .errors import FitError, SpecError
from .flows import (
    AnisotropicRadial,
    Circular,
    ConstantShear,
    HolderShear,
    Isotropic,
    PowerShear,
    VelocityField,
    Zero,
    is_shear,
)
from .grid import CartesianGrid, _advect_general, _advect_shear
from .polar import PolarGrid, PolarStepper, polar_field_from_function
from .stochastic import SdeConfig


# ---------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class TentShear:
    beta: float


@dataclass(frozen=True)
class AnnulusCircular:
    beta: float


@dataclass(frozen=True)
class SineX:
    pass


def beta_for_flow(flow: VelocityField) -> float:
    """Localization exponent of the initial data, set by the flow family."""
    if isinstance(flow, PowerShear):
        return 1.0 / (flow.n + 2.0)
    if isinstance(flow, ConstantShear):
        return 1.0 / 3.0
    if isinstance(flow, HolderShear):
        return 1.0 / (flow.alpha + 2.0)
    if isinstance(flow, Circular):
        return 1.0 / (flow.q + 2.0)
    raise SpecError(f"no localization scale for {type(flow).__name__}")


@dataclass(frozen=True)
class InitialData:
    """Evaluable initial scalar with exact support and norm metadata."""

    kind: str
    kappa: float
    beta: float
    support: tuple[float, float]

    def eval_xy(self, x, y):
        """Evaluation on plane coordinates (Monte Carlo and Cartesian grids)."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "sine-x":
            return np.sin(x)
        if self.kind == "tent-shear":
            half = self.kappa ** self.beta
            return np.maximum(half - np.abs(y), 0.0) * np.sin(x)
        # annulus evaluated through polar coordinates of the plane point
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        return self.eval_polar(r, theta)

    def eval_polar(self, r, theta):
        if self.kind != "annulus-circular":
            raise SpecError(f"{self.kind} is not polar initial data")
        half = self.kappa ** self.beta
        phi = np.maximum(half - np.abs(np.asarray(r) - 3.0 * half), 0.0)
        return phi * np.sin(theta)

    def mc_callable(self):
        return lambda pts: self.eval_xy(pts[:, 0], pts[:, 1])

    def exact_l2sq(self, ly: float | None = None) -> float:
        """Closed-form squared L2 norm on the run domain."""
        half = self.kappa ** self.beta
        if self.kind == "sine-x":
            if ly is None:
                raise SpecError("sine-x norm needs the domain half-height")
            return 2.0 * math.pi * ly
        if self.kind == "tent-shear":
            return math.pi * (2.0 / 3.0) * half ** 3
        return 2.0 * math.pi * half ** 4


def build_initial_data(variant, kappa: float) -> InitialData:
    """Realize an initial-data variant at a given diffusivity."""
    if not 0.0 < kappa < 1.0:
        raise SpecError(f"kappa must lie in (0, 1), got {kappa}")
    if isinstance(variant, SineX):
        return InitialData(kind="sine-x", kappa=kappa, beta=0.0, support=(-math.inf, math.inf))
    if isinstance(variant, TentShear):
        half = kappa ** variant.beta
        return InitialData(
            kind="tent-shear", kappa=kappa, beta=variant.beta, support=(-half, half)
        )
    if isinstance(variant, AnnulusCircular):
        half = kappa ** variant.beta
        return InitialData(
            kind="annulus-circular",
            kappa=kappa,
            beta=variant.beta,
            support=(2.0 * half, 4.0 * half),
        )
    raise SpecError(f"unknown initial-data variant {variant!r}")


def initial_data_for(flow: VelocityField, kind: str, kappa: float) -> InitialData:
    """Pair a flow with an initial-data family, rejecting mismatches."""
    if kind == "sine-x":
        return build_initial_data(SineX(), kappa)
    if kind == "tent-shear":
        if not is_shear(flow) or isinstance(flow, Zero):
            raise SpecError("tent-shear data needs a shear flow with a rate scale")
        return build_initial_data(TentShear(beta_for_flow(flow)), kappa)
    if kind == "annulus-circular":
        if not isinstance(flow, Circular):
            raise SpecError("annulus-circular data needs a circular flow")
        return build_initial_data(AnnulusCircular(beta_for_flow(flow)), kappa)
    raise SpecError(f"unknown initial data kind {kind!r}")


# ---------------------------------------------------------------------------
# predictions


def predicted_exponent(family: str, **params) -> float:
    """Positive mixing exponent; the predicted log-log slope is its negative."""
    if family == "critical-shear":
        n = params["n"]
        return n / (n + 2.0)
    if family == "holder":
        alpha = params["alpha"]
        return alpha / (alpha + 2.0)
    if family == "circular":
        q = params["q"]
        return q / (q + 2.0)
    if family == "anisotropic":
        q, gamma = params["q"], params["gamma"]
        return (q + gamma) / (q + 2.0)
    raise SpecError(f"unknown family {family!r}")


class BalanceRegime(Enum):
    RADIAL_DOMINANT = "radial-dominant"
    ANGULAR_DOMINANT = "angular-dominant"
    BALANCED = "balanced"


def balance_regime_classifier(q: float, gamma: float) -> BalanceRegime:
    if gamma < q:
        return BalanceRegime.RADIAL_DOMINANT
    if gamma > q:
        return BalanceRegime.ANGULAR_DOMINANT
    return BalanceRegime.BALANCED


def regime_predicted_slope(q: float, gamma: float) -> float:
    """Case-selected mixing-time slope for the anisotropic family."""
    regime = balance_regime_classifier(q, gamma)
    if regime is BalanceRegime.RADIAL_DOMINANT:
        return -q / (q + 2.0)
    if regime is BalanceRegime.ANGULAR_DOMINANT:
        return -(1.0 + gamma / (q + 2.0))
    return -(q + gamma) / (q + 2.0)


def log_correction_factor(q: float, kappa: float) -> float:
    """The 1 + log(1/kappa^(q/(q+2))) factor multiplying the mixing time."""
    return 1.0 + (q / (q + 2.0)) * math.log(1.0 / kappa)


# ---------------------------------------------------------------------------
# experiment specification


@dataclass(frozen=True)
class ExperimentSpec:
    flow: VelocityField
    kappas: tuple
    initial_data: str = "tent-shear"
    backend: str = "grid"
    gamma: float = 0.0
    theta_mix: float = 1.0 / math.e
    nx: int = 256
    ny: int = 256
    nr: int = 256
    ntheta: int = 256
    steps_per_scale: int = 200
    horizon_factor: float = 60.0
    base_seed: int = 0
    log_correction: str = "auto"
    mc_samples: int = 2000
    mc_nodes_x: int = 8
    mc_nodes_y: int = 17
    mc_max_observations: int = 400

    def __post_init__(self):
        ks = tuple(float(k) for k in self.kappas)
        if any(not 0.0 < k < 1.0 for k in ks):
            raise SpecError("kappa values must lie in (0, 1)")
        if not all(a > b for a, b in zip(ks, ks[1:])):
            raise SpecError("kappa values must be strictly decreasing")
        if not 0.0 < self.theta_mix < 1.0:
            raise SpecError(f"theta_mix must lie in (0, 1), got {self.theta_mix}")
        if self.backend not in ("grid", "monte-carlo"):
            raise SpecError(f"unknown backend {self.backend!r}")
        if self.log_correction not in ("auto", "on", "off"):
            raise SpecError(f"log_correction must be auto/on/off")
        object.__setattr__(self, "kappas", ks)
        # validate the pairing early, at the largest kappa
        initial_data_for(self.flow, self.initial_data, ks[0])

    @property
    def family(self) -> str:
        if isinstance(self.flow, PowerShear):
            return "critical-shear"
        if isinstance(self.flow, ConstantShear):
            return "critical-shear"
        if isinstance(self.flow, HolderShear):
            return "holder"
        if isinstance(self.flow, Circular):
            return "circular" if self.gamma == 0.0 else "anisotropic"
        return "oracle"

    def predicted_slope(self) -> float:
        if isinstance(self.flow, (PowerShear, ConstantShear)):
            n = self.flow.n if isinstance(self.flow, PowerShear) else 1
            return -predicted_exponent("critical-shear", n=n)
        if isinstance(self.flow, HolderShear):
            return -predicted_exponent("holder", alpha=self.flow.alpha)
        if isinstance(self.flow, Circular):
            if self.gamma == 0.0:
                return -predicted_exponent("circular", q=self.flow.q)
            return regime_predicted_slope(self.flow.q, self.gamma)
        return -1.0  # pure diffusion oracle: T = 1/kappa

    def correction_q(self) -> float | None:
        """q of the log-correction factor, when the fit should divide it out."""
        if self.log_correction == "off":
            return None
        if self.log_correction == "on" or isinstance(self.flow, Circular):
            q = self.flow.q if isinstance(self.flow, Circular) else 1.0
            return q
        return None


@dataclass(frozen=True)
class MixingTime:
    T: float
    censored: bool
    kappa: float


def _shear_rate(flow: VelocityField, y: float) -> float:
    """|u'(y)|, the local winding rate of a shear profile."""
    if isinstance(flow, ConstantShear):
        return abs(flow.s)
    if isinstance(flow, PowerShear):
        return flow.n * abs(y) ** (flow.n - 1)
    if isinstance(flow, HolderShear):
        return flow.c * flow.alpha * abs(y) ** (flow.alpha - 1.0)
    return 0.0


def _cartesian_scales(flow, data: InitialData, kappa: float) -> tuple[float, float]:
    """(fastest, slowest) decay time scales for step sizing and horizons."""
    scales = [1.0 / kappa]  # bare heat decay of the sin x mode
    if data.kind == "tent-shear":
        half = kappa ** data.beta
        scales.append(half ** 2 / kappa)  # diffusion across the support
        rate = _shear_rate(flow, half)
        if rate > 0.0:
            scales.append((3.0 / (kappa * rate ** 2)) ** (1.0 / 3.0))
    elif not isinstance(flow, Zero):
        rate = max(_shear_rate(flow, 1.0), 1e-12)
        scales.append((3.0 / (kappa * rate ** 2)) ** (1.0 / 3.0))
    return min(scales), max(scales)


def _polar_scales(q: float, gamma: float, kappa: float) -> tuple[float, float]:
    beta = 1.0 / (q + 2.0)
    half = kappa ** beta
    scales = []
    for r in (2.0 * half, 4.0 * half):
        keff = kappa * r ** gamma
        rate = q * r ** (q - 1.0)
        scales.append((3.0 / (keff * rate ** 2)) ** (1.0 / 3.0))
    keff_mid = kappa * (3.0 * half) ** gamma
    scales.append(half ** 2 / keff_mid)
    return min(scales), max(scales)


def _parseval_l2sq_cartesian(fh: np.ndarray, grid: CartesianGrid) -> float:
    power = (fh.real ** 2 + fh.imag ** 2) * grid._spectral_weight[None, :]
    return float(np.sum(power)) * grid.cell_area / (grid.nx * grid.ny)


def _measure_cartesian(spec: ExperimentSpec, kappa: float) -> MixingTime:
    data = initial_data_for(spec.flow, spec.initial_data, kappa)
    if data.kind == "sine-x":
        ly = math.pi
    else:
        ly = max(8.0 * kappa ** data.beta, 1.0)
    grid = CartesianGrid(spec.nx, spec.ny, ly)
    X, Y = grid.mesh
    values = data.eval_xy(X, Y)
    fast, slow = _cartesian_scales(spec.flow, data, kappa)
    dt = fast / spec.steps_per_scale
    horizon = spec.horizon_factor * slow
    half_mult = np.exp(-kappa * grid._k2_half * (0.5 * dt))
    fh = np.fft.rfft2(values)
    e0 = _parseval_l2sq_cartesian(fh, grid)
    target = (spec.theta_mix ** 2) * e0
    t = 0.0
    shear = is_shear(spec.flow)
    while t < horizon:
        fh *= half_mult
        vals = np.fft.irfft2(fh, s=(grid.nx, grid.ny))
        if shear:
            vals = _advect_shear(vals, grid, spec.flow, dt)
        else:
            vals = _advect_general(vals, grid, spec.flow, dt)
        fh = np.fft.rfft2(vals)
        fh *= half_mult
        t += dt
        if _parseval_l2sq_cartesian(fh, grid) <= target:
            return MixingTime(T=t, censored=False, kappa=kappa)
    return MixingTime(T=horizon, censored=True, kappa=kappa)


def _parseval_l2sq_polar(fh: np.ndarray, grid: PolarGrid) -> float:
    mult = np.full(grid.ntheta // 2 + 1, 2.0)
    mult[0] = 1.0
    if grid.ntheta % 2 == 0:
        mult[-1] = 1.0
    power = (fh.real ** 2 + fh.imag ** 2) * mult[None, :]
    ring = np.sum(power, axis=1) * grid.r_centers
    return float(np.sum(ring)) * grid.dr * grid.dtheta / grid.ntheta


def _measure_polar(spec: ExperimentSpec, kappa: float) -> MixingTime:
    q = spec.flow.q
    data = initial_data_for(spec.flow, spec.initial_data, kappa)
    beta = data.beta
    half = kappa ** beta
    grid = PolarGrid(spec.nr, spec.ntheta, r_min=0.25 * half, r_max=8.0 * half)
    field = polar_field_from_function(grid, lambda r, th: data.eval_polar(r, th))
    diff = (
        Isotropic(kappa)
        if spec.gamma == 0.0
        else AnisotropicRadial(kappa=kappa, gamma=spec.gamma)
    )
    fast, slow = _polar_scales(q, spec.gamma, kappa)
    dt = fast / spec.steps_per_scale
    horizon = spec.horizon_factor * max(slow, log_correction_factor(q, kappa) * fast)
    stepper = PolarStepper(grid, q, diff, dt)
    fh = np.fft.rfft(field.values, axis=1)
    e0 = _parseval_l2sq_polar(fh, grid)
    target = (spec.theta_mix ** 2) * e0
    t = 0.0
    while t < horizon:
        fh = stepper.step_modes(fh)
        t += dt
        if _parseval_l2sq_polar(fh, grid) <= target:
            return MixingTime(T=t, censored=False, kappa=kappa)
    return MixingTime(T=horizon, censored=True, kappa=kappa)


def _mc_quadrature(spec: ExperimentSpec, data: InitialData, kappa: float, horizon: float):
    spread = 4.5 * math.sqrt(2.0 * kappa * horizon)
    if data.kind == "sine-x":
        return fk.torus_quadrature(spec.mc_nodes_x, 4, ly=math.pi)
    if data.kind == "tent-shear":
        y_max = data.support[1] + spread
        return fk.strip_quadrature(spec.mc_nodes_x, -y_max, y_max, spec.mc_nodes_y)
    r_lo = max(data.support[0] - spread, 1e-6)
    r_hi = data.support[1] + spread
    rs = np.linspace(r_lo, r_hi, spec.mc_nodes_y)
    wr = np.full(spec.mc_nodes_y, (r_hi - r_lo) / (spec.mc_nodes_y - 1))
    wr[0] *= 0.5
    wr[-1] *= 0.5
    ths = np.arange(spec.mc_nodes_x) * (2.0 * math.pi / spec.mc_nodes_x)
    pts = np.array([(r * math.cos(th), r * math.sin(th)) for r in rs for th in ths])
    w = np.array([wrj * r * (2.0 * math.pi / spec.mc_nodes_x) for wrj, r in zip(wr, rs) for _ in ths])
    return fk.QuadratureGrid(points=pts, weights=w)


def _measure_monte_carlo(spec: ExperimentSpec, kappa: float) -> MixingTime:
    """Mixing time via the dissipation identity: the norm has dropped to
    theta_mix once (1/2) integral Var >= (1 - theta_mix^2) * (1/2)||rho0||^2."""
    data = initial_data_for(spec.flow, spec.initial_data, kappa)
    if data.kind == "sine-x":
        fast, slow = 1.0 / kappa, 1.0 / kappa
        ly = math.pi
    elif data.kind == "tent-shear":
        fast, slow = _cartesian_scales(spec.flow, data, kappa)
        ly = max(8.0 * kappa ** data.beta, 1.0)
    else:
        fast, slow = _polar_scales(spec.flow.q, spec.gamma, kappa)
        ly = None
    dt = fast / spec.steps_per_scale
    horizon = spec.horizon_factor * slow
    quad = _mc_quadrature(spec, data, kappa, horizon)
    diff = (
        Isotropic(kappa)
        if spec.gamma == 0.0
        else AnisotropicRadial(kappa=kappa, gamma=spec.gamma)
    )
    e0 = data.exact_l2sq(ly=ly)
    target = (1.0 - spec.theta_mix ** 2) * 0.5 * e0
    n_steps = int(math.ceil(horizon / dt))
    thin = max(1, n_steps // spec.mc_max_observations)
    times = np.arange(1, n_steps // thin + 1) * (thin * dt)
    cfg = SdeConfig(dt=dt, t_final=float(times[-1]))
    ladder = fk.integrated_variance_ladder(
        data.mc_callable(), spec.flow, diff, quad, cfg,
        spec.mc_samples, spec.base_seed, times,
    )
    for iv in ladder:
        if iv.value >= target:
            return MixingTime(T=iv.time, censored=False, kappa=kappa)
    return MixingTime(T=float(times[-1]), censored=True, kappa=kappa)


def measure_mixing_time(spec: ExperimentSpec, kappa: float) -> MixingTime:
    """First threshold crossing of the relative L2 norm (or its MC proxy)."""
    if spec.backend == "monte-carlo":
        return _measure_monte_carlo(spec, kappa)
    if isinstance(spec.flow, Circular):
        return _measure_polar(spec, kappa)
    return _measure_cartesian(spec, kappa)


# ---------------------------------------------------------------------------
# scaling fits


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    residual_rms: float
    ci_halfwidth: float
    log_correction_applied: bool
    fitted_constant: float
    n_points: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    fit: ScalingFit
    predicted_slope: float

    @property
    def slope_gap(self) -> float:
        return abs(self.fit.slope - self.predicted_slope)


def fit_power_law(kappas, times, correction_q: float | None = None) -> ScalingFit:
    """OLS of log T (optionally log-corrected) against log kappa."""
    kappas = np.asarray(kappas, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if kappas.size < 4:
        raise FitError(f"need at least 4 points for a fit, got {kappas.size}")
    y = np.log(times)
    if correction_q is not None:
        y = y - np.log([log_correction_factor(correction_q, k) for k in kappas])
    x = np.log(kappas)
    n = x.size
    xbar = x.mean()
    ybar = y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if n > 2:
        s2 = float(np.sum(resid ** 2) / (n - 2))
        se = math.sqrt(s2 / sxx)
        half = float(stats.t.ppf(0.975, n - 2) * se)
    else:
        half = math.inf
    return ScalingFit(
        slope=slope,
        intercept=intercept,
        residual_rms=rms,
        ci_halfwidth=half,
        log_correction_applied=correction_q is not None,
        fitted_constant=math.exp(intercept),
        n_points=n,
    )


def sweep_and_fit(spec: ExperimentSpec, executor=None) -> SweepResult:
    """Measure T(kappa) across the sweep and fit the scaling exponent.

    Censored points are excluded; fewer than 4 usable points raises
    ``FitError`` listing the censored kappas.  ``executor`` may be a
    concurrent.futures executor; results are merged in kappa order so the
    outcome is independent of scheduling.
    """
    if executor is None:
        rows = tuple(measure_mixing_time(spec, k) for k in spec.kappas)
    else:
        futures = [executor.submit(measure_mixing_time, spec, k) for k in spec.kappas]
        rows = tuple(f.result() for f in futures)
    usable = [(r.kappa, r.T) for r in rows if not r.censored]
    if len(usable) < 4:
        raise FitError(
            f"only {len(usable)} uncensored points",
            censored=[r.kappa for r in rows if r.censored],
        )
    ks, ts = zip(*usable)
    fit = fit_power_law(ks, ts, correction_q=spec.correction_q())
    return SweepResult(rows=rows, fit=fit, predicted_slope=spec.predicted_slope())


def synthetic_sweep(slope: float, kappas, log_q: float | None = None):
    """Exact power-law mixing times for fit validation (no solver)."""
    rows = []
    for k in kappas:
        t = k ** slope
        if log_q is not None:
            t *= log_correction_factor(log_q, k)
        rows.append(MixingTime(T=t, censored=False, kappa=float(k)))
    return tuple(rows)


# ---------------------------------------------------------------------------
# variance-bound diagnostics


@dataclass(frozen=True)
class BoundRow:
    t: float
    measured: float
    bracket: float
    ratio: float


@dataclass(frozen=True)
class BoundReport:
    rows: tuple
    fitted_C: float
    monotone_ratio: bool

    def bound_with_C(self, t_index: int) -> float:
        return self.fitted_C * self.rows[t_index].bracket


def variance_bound_report(
    spec: ExperimentSpec, kappa: float, t_ladder, n_samples: int | None = None
) -> BoundReport:
    """Integrated trajectory variance over the strip T x [-2 k^b, 2 k^b]
    against the critical-shear bracket
    ||rho0||^2 (k t + (k^(n/(n+2)) t)^2 + (k^(n/(n+2)) t)^(n+2)),
    with C fitted as the largest measured/bracket ratio."""
    if not isinstance(spec.flow, (PowerShear, ConstantShear)):
        raise SpecError("variance bound report applies to the critical-shear family")
    n = spec.flow.n if isinstance(spec.flow, PowerShear) else 1
    data = initial_data_for(spec.flow, "tent-shear", kappa)
    half = kappa ** data.beta
    quad = fk.strip_quadrature(spec.mc_nodes_x, -2.0 * half, 2.0 * half, spec.mc_nodes_y)
    times = sorted(float(t) for t in t_ladder)
    n_samples = n_samples or spec.mc_samples
    diff = Isotropic(kappa)
    cfg = SdeConfig(dt=times[-1] / 256.0, t_final=times[-1])
    fields = fk.variance_field_ladder(
        data.mc_callable(), spec.flow, diff, quad, cfg,
        n_samples, spec.base_seed, times=times,
    )
    e0 = data.exact_l2sq()
    exponent = n / (n + 2.0)
    rows = []
    for vf in fields:
        measured = float(np.dot(vf.weights, vf.variances))
        s = kappa ** exponent * vf.time
        bracket = e0 * (kappa * vf.time + s ** 2 + s ** (n + 2))
        rows.append(BoundRow(t=vf.time, measured=measured, bracket=bracket,
                             ratio=measured / bracket if bracket > 0 else math.nan))
    ratios = [r.ratio for r in rows if math.isfinite(r.ratio)]
    fitted_C = max(ratios) if ratios else math.nan
    monotone = all(b >= a * (1.0 - 1e-9) for a, b in zip(ratios, ratios[1:]))
    return BoundReport(rows=tuple(rows), fitted_C=fitted_C, monotone_ratio=monotone)


@dataclass(frozen=True)
class SeparationBoundRow:
    t: float
    left: float
    right: float


def separation_bound_report(
    flow: VelocityField,
    kappa: float,
    times,
    grad_inf_sq: float,
    dissipation,
    quad: fk.QuadratureGrid,
    n_pairs: int,
    seed: int,
) -> tuple[tuple[SeparationBoundRow, ...], float]:
    """Reported two-sided diagnostic of the separation inequality:
    left = accumulated dissipation, right = ||grad rho0||_inf^2 times the
    quadrature double integral of E|X_t(x) - X_t(y)|^2.  Returns the rows
    and the fitted constant C = max(left/right)."""
    from .stochastic import Coupling, two_point_separation

    rows = []
    gen = np.random.Generator(np.random.PCG64(seed))
    pairs = gen.integers(0, quad.n_nodes, size=(8, 2))
    area = float(np.sum(quad.weights))
    for t, left in zip(times, dissipation):
        cfg = SdeConfig(dt=t / 64.0, t_final=t)
        seps = []
        for i, (a, b) in enumerate(pairs):
            est = two_point_separation(
                flow, Isotropic(kappa), quad.points[a], quad.points[b],
                cfg, Coupling.INDEPENDENT_NOISE, n_pairs, rng.mix(seed, i),
            )
            seps.append(est.value)
        right = grad_inf_sq * float(np.mean(seps)) * area ** 2
        rows.append(SeparationBoundRow(t=t, left=left, right=right))
    ratios = [r.left / r.right for r in rows if r.right > 0]
    return tuple(rows), (max(ratios) if ratios else math.nan)
