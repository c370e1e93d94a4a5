"""Equilibrium smoothing toolkit for locally linear binary classifiers.

Computes the optimal constant-vector smoothing defense from finitely many
linearization samples, simulates the zero-sum attacker/defender game, and
verifies the equilibrium and generalization behavior with exact small-scale
oracles and closed-form Gaussian ground truth.
"""

from .errors import (
    DegenerateRecord,
    DistributionMismatch,
    EqsmoothError,
    InvalidInput,
    ModelAssumptionViolated,
    ModelRequired,
    TooLarge,
    Unsupported,
    ZeroGradient,
)
from .game import AttackSpec, DefenseSpec, GameReport, fgm_best_response_check, resolve_attack, simulate, utility
from .geometry import (
    Budget,
    Dataset,
    HalfSpace,
    LinearizationRecord,
    fgm_direction,
    halfspace_of,
    in_robust_set,
    phi_n,
    project_to_ball,
    uniform_ball,
)
from .oracle import OracleResult, count_regions_2d, min_norm_feasible_point, oracle_solve
from .solve import SolveConfig, SolveResult, solve, surrogate, surrogate_gradient, surrogate_objective
from .synthetic import (
    FanModel,
    GaussianSpec,
    LinearModel,
    SyntheticModel,
    linearize,
    phi_closed_form,
    sample_dataset,
    true_vstar_linear,
)

__version__ = "0.1.0"
