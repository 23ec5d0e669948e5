"""p-capacities, p-parabolicity and comparison experiments on model manifolds."""

from .aoperator import AOperator, a_inverse, blended, p_power, scaled_p_power
from .capacity import (
    CapacityEstimate,
    MeshOptions,
    annulus_capacity_closed_form,
    cutoff_upper_bound,
    global_capacity,
    numerical_capacity,
)
from .criteria import ParabolicityVerdict, classify
from .functions import RadialFunction
from .geometry import ModelSpace, WarpProfile, annulus_volume, ball_volume, make_profile
from .quadrature import QuadratureResult, improper_integral
from .radial import (
    ComparisonReport,
    comparison_experiment,
    eta_annulus,
    eta_exterior,
    radial_a_harmonic,
)

__version__ = "0.1.0"
