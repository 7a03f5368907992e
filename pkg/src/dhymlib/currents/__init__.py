from .kernel import (
    MollifierKernel,
    eta_constant,
    sphere_area,
)
from .chart import (
    POLE_FLOOR,
    ChartPotential,
    available_charts,
    chart_from_catalog,
    comparison_check,
    hessian_angles,
    lelong_proxy,
    load_chart,
    matrix_jensen_check,
    mollify,
    mollify_at,
    sup_at,
    sup_convolution,
)
from .gluing import (
    regularized_max,
    smooth_max,
)
