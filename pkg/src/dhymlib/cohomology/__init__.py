from .ring import (
    FULL_SPACE,
    ClassVector,
    Subvariety,
    ToyRing,
    blowup_cp2,
    complex_torus,
    product_of_curves,
    projective_space,
)
from .ring_database import (
    RingDatabase,
    load_ring,
    ring_from_dict,
)
from .stability import (
    Phase,
    TestFamilyClass,
    central_constraint,
    check_stable,
    check_uniform_stable,
    corollary_C_hypotheses,
    family_condition_C,
    overall,
    phase_from_classes,
    stab_derivative,
    stab_poly_coeffs,
    stab_value,
    sturm_decide,
    theta0_from_classes,
)
