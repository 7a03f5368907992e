from .ppform import (
    PPForm,
    SimplePositiveForm,
    as_form,
    basis_density,
    complex_power,
    pair_top,
    rotate,
    volume_coefficient,
    wedge,
)
from .positivity import (
    positivity_check,
    squeezed_angle_check,
    terms_SG_check,
)
