from .torus import (
    PotentialGrid,
    TorusProblem,
    angle_density,
    compatibility_gap,
    complex_hessian,
    cone_margins,
    density,
    hessian_form,
    manufactured_twist,
    relative_eigenvalues,
    residual,
    trigonometric_potential,
)
from .newton import (
    NewtonReport,
    continuity_path,
    easy_twist,
    newton_solve,
)
from .constants import (
    TwistedConstants,
    compute_constants,
)
from .fiber import (
    FiberAtom,
    FiberMeasure,
    average_angle,
    fiber_average,
    jensen_check,
    random_fiber_measure,
    truncated_cot_bound,
    truncated_fiber_bound,
)
from .problem_io import (
    available_problems,
    load_problem,
    problem_from_dict,
    read_potential_csv,
    write_potential_csv,
)
