"""enhdiff: a numerical laboratory for enhanced dissipation in
advection-diffusion flows.

Two cross-validated solvers — a Feynman-Kac Monte Carlo sampler over
backward stochastic trajectories and a semi-Lagrangian/spectral grid
stepper — measure how fast shear, Hölder, circular, and anisotropic
circular flows mix a passive scalar, and fit the kappa-scaling of the
mixing time against the predicted exponents.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    EnhdiffError,
    EstimatorError,
    FitError,
    GeometryError,
    SpecError,
    StepError,
    UnsupportedVariantError,
)
from .flows import (
    AnisotropicRadial,
    Circular,
    ConstantShear,
    HolderShear,
    Isotropic,
    PowerShear,
    Zero,
    eval_diffusivity,
    eval_velocity,
    verify_holder,
)
from .stochastic import (
    Coupling,
    SdeConfig,
    SeparationEstimate,
    TrajectoryEnsemble,
    shear_increment_functional,
    simulate_ensemble,
    simulate_trajectory,
    two_point_separation,
)
from .feynman_kac import (
    IntegratedVariance,
    PointEstimate,
    QuadratureGrid,
    estimate_density,
    estimate_variance,
    integrated_variance,
    torus_quadrature,
)
from .grid import (
    CartesianGrid,
    EnergyLedger,
    ScalarField,
    advect_semi_lagrangian,
    diffuse_spectral,
    energy_ledger_update,
    field_from_function,
    step_strang,
)
from .polar import PolarField, PolarGrid, polar_field_from_function, step_polar
from .ibm import (
    Interface,
    RegularizedDelta,
    circle_interface,
    delta_eval,
    interface_sample,
    spread,
)
from .experiments import (
    ExperimentSpec,
    MixingTime,
    ScalingFit,
    balance_regime_classifier,
    build_initial_data,
    fit_power_law,
    initial_data_for,
    measure_mixing_time,
    predicted_exponent,
    regime_predicted_slope,
    sweep_and_fit,
    variance_bound_report,
)
