"""Fractional-order chaotic systems: PECE integration, stability tests,
chaos order thresholds and single-gain state-feedback design."""

__version__ = "0.1.0"

from .analysis import (
    EquilibriumReport,
    SaddleIndex,
    classify_saddle,
    eigenvalues_at,
    flagship_equilibria,
    newton_refine,
)
from .chaos import ChaosThresholdReport, chaos_order_threshold, system_chaos_threshold
from .control import (
    FeedbackLaw,
    GainCertificate,
    GainInterval,
    admissible_gain_interval,
    closed_loop_cubic,
    closed_loop_jacobian,
    design_report,
)
from .core import (
    DEFAULT_PARAMS,
    ContractError,
    OrderVector,
    SystemModel,
    SystemParams,
    flagship_jacobian,
    flagship_vector_field,
)
from .solver import DivergenceError, SolverConfig, Trajectory, solve_controlled, solve_pece
from .stability import (
    CubicCoefficients,
    StabilityVerdict,
    Verdict,
    cubic_discriminant,
    incommensurate_stable,
    matignon_commensurate,
    routh_hurwitz_fractional,
)
