"""Numerical verification of Talenti-type comparison principles for the
Poisson equation with non-homogeneous Neumann boundary conditions.

The package computes decreasing rearrangements and Lorentz norms exactly for
step data, solves the Schwarz-symmetrized problem on the ball in closed form,
carries a catalog of reference configurations with known solutions, and
cross-validates everything against an independent finite-difference solver.
"""

from .errors import (
    CompatibilityError,
    ConvergenceError,
    DegenerateConditionError,
    DomainError,
    PositivityError,
)
from .lorentz import LorentzIndex, lorentz_norm, lp_norm
from .measure import (
    DistributionCurve,
    SampledFunction,
    StepRearrangement,
    decreasing_rearrangement,
    distribution,
    hardy_littlewood_pairing,
    partial_integral,
    step_sup_distance,
)
from .radial import (
    NormalizationCondition,
    RadialSolution,
    SymmetrizedProblem,
    c_star_of,
    check_fundamental_identity,
    gamma_n,
    phi_curve,
    radial_derivative,
    resolve_gamma_normalization,
    solve,
    sphere_area,
    unit_ball_volume,
)
from .geometry import (
    CaseId,
    ComponentSpec,
    ExampleCase,
    boundary_moment,
    condition_rhs,
    constant_load_case,
    evaluate_u,
    expected_constants,
    level_set_data,
    make_case,
    make_example,
    sample_domain,
)
from .theorems import (
    check_level_set_inequality,
    run_counterexample,
    run_theorem_1_1,
    run_theorem_1_2,
)

__version__ = "0.1.0"
