from .angles import (
    AngleBudget,
    RelativePair,
    angle_P,
    angle_Q,
    angle_Q_bruteforce,
    angle_budget,
    arccot,
    eigen_frame,
    eigenvalues_rel,
    family_threshold_ok,
    in_gamma,
    p_from_eigenvalues,
    product_subsolution,
    q_from_eigenvalues,
    small_radius_limit,
    twisted_K_lower_bound,
    variational_Q,
)
from .inequalities import (
    semicontinuity_margin,
    solvability_margin,
    uniform_continuity_check,
)
from .calibration import (
    CalibrationTable,
    default_table,
)
