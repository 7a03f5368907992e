""" unit tests kernel.py, chart.py and gluing.py functions
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dhymlib.currents as cu
from dhymlib.currents.chart import chart_from_dict, complex_hessian
from dhymlib.errors import HypothesisViolated, ParseError, ResolutionError, SeparationViolated

LOG2 = np.log(2.0)


@pytest.fixture(scope="module")
def chart(request):
    if request.param == "log_pole":
        return cu.chart_from_catalog("log_pole")
    elif request.param == "shifted_pole":
        return cu.chart_from_catalog("log_pole", center=[[0.0625, 0.0]])
    elif request.param == "quadratic":
        return cu.chart_from_catalog("quadratic")
    elif request.param == "smooth":
        return cu.chart_from_catalog("smooth")
    elif request.param == "mixture":
        return cu.load_chart("mixture")


@pytest.fixture(scope="module")
def quadratic():
    return cu.chart_from_catalog("quadratic")


@pytest.fixture(scope="module")
def log_pole():
    return cu.chart_from_catalog("log_pole")


"""
Kernel
"""


@pytest.mark.parametrize("m, area", [(1, 2.0 * np.pi), (2, 2.0 * np.pi**2), (3, np.pi**3)])
def test_sphere_area(m, area):
    assert np.isclose(cu.sphere_area(m), area, rtol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kernel_mass(m):
    kernel = cu.MollifierKernel(m)
    assert np.isclose(kernel.mass, 1.0, rtol=0.0, atol=1e-8)
    assert 0.0 < kernel.second_moment < 1.0


def test_kernel_profile():
    kernel = cu.MollifierKernel(1)
    plateau = kernel.profile(np.linspace(0.0, 0.5, 11))
    assert np.allclose(plateau, plateau[0], rtol=1e-14)
    assert np.all(kernel.profile(np.array([1.0, 1.2, 3.0])) == 0.0)
    tail = kernel.profile(np.linspace(0.5, 1.0, 51))
    assert np.all(tail >= 0.0)
    assert np.all(np.diff(tail) <= 1e-15)


def test_shell_kernel_mass():
    kernel = cu.MollifierKernel(2, shell_weight=10.0, shell_width=0.1)
    assert np.isclose(kernel.mass, 1.0, rtol=0.0, atol=1e-8)
    assert kernel.profile(0.95) > kernel.profile(0.2)


@pytest.mark.parametrize("kwargs", [dict(m=0), dict(shell_weight=-1.0), dict(shell_width=0.0), dict(shell_width=0.75)])
def test_bad_kernel(kwargs):
    with pytest.raises(ValueError):
        cu.MollifierKernel(**kwargs)


def test_stencil_weights_normalized():
    weights = cu.MollifierKernel(1).stencil_weights(np.array([0.0, 0.1, 0.2, 0.3]), 0.25)
    assert np.isclose(weights.sum(), 1.0)
    assert weights[-1] == 0.0


"""
Comparison constant
"""


def test_eta_head_m1():
    eta = cu.eta_constant(1)
    # 3 / 2^-1 log 2 plus a positive tail
    assert eta > 6.0 * LOG2
    assert eta < 6.0 * LOG2 + 1.0


@pytest.mark.parametrize("m", [1, 2])
def test_eta_quadrature_agreement(m):
    assert np.isclose(cu.eta_constant(m), cu.eta_constant(m, points=200001), rtol=0.0, atol=1e-8)


def test_eta_shell_kernel_approaches_head():
    kernel = cu.MollifierKernel(1, shell_weight=1e6, shell_width=0.02)
    assert abs(cu.eta_constant(1, kernel) - 6.0 * LOG2) < 0.05


def test_eta_dimension_mismatch():
    with pytest.raises(ValueError):
        cu.eta_constant(2, cu.MollifierKernel(1))


"""
Chart grids
"""


def test_chart_grid(quadratic):
    assert quadratic.m == 1
    assert quadratic.size == 513
    assert quadratic.domain == 4.0
    assert quadratic.value_at([0.25, 0.5]) == 0.3125
    assert quadratic.value_at(0.25 + 0.5j) == 0.3125


@pytest.mark.parametrize("shape", [(5, 5), (4, 4), (9, 9, 9)])
def test_chart_bad_grid(shape):
    with pytest.raises(ResolutionError):
        cu.ChartPotential(np.zeros(shape), 0.1, 1.0)


def test_off_grid_point(quadratic):
    with pytest.raises(HypothesisViolated):
        quadratic.index_of([0.01, 0.0])
    with pytest.raises(HypothesisViolated):
        quadratic.index_of([0.0, 0.0, 0.0])


def test_pole_floor(log_pole):
    assert log_pole.value_at([0.0, 0.0]) == cu.POLE_FLOOR
    assert log_pole.poles[0].tolist() == [0.0, 0.0]


"""
Mollification
"""


def test_mollify_constant():
    T = cu.ChartPotential.from_function(lambda z: np.full(z.shape, 2.5))
    smoothed = cu.mollify(T, 0.125)
    defined = np.isfinite(smoothed.values)
    assert defined.sum() > 0
    assert np.allclose(smoothed.values[defined], 2.5, rtol=1e-13)
    assert smoothed.domain == 3.0


def test_mollify_quadratic(quadratic):
    r = 0.25
    points = [[0.0, 0.0], [0.5, 0.0], [0.25, -0.25]]
    values = cu.mollify_at(quadratic, r, points)
    shift = cu.MollifierKernel(1).second_moment * r**2
    for point, value in zip(points, values):
        assert np.isclose(value - quadratic.value_at(point), shift, rtol=1e-2)


def test_mollify_commutes_with_translation(quadratic):
    shifted = cu.chart_from_catalog("quadratic", center=[[0.25, 0.0]])
    a = cu.mollify_at(shifted, 0.125, [[0.25, 0.0]])
    b = cu.mollify_at(quadratic, 0.125, [[0.0, 0.0]])
    assert np.isclose(a[0], b[0], rtol=1e-12)


def test_mollify_monotone_and_linear(quadratic):
    smooth = cu.chart_from_catalog("smooth")
    points = [[0.0, 0.0], [0.5, 0.25], [-1.0, 0.5]]
    sum_chart = cu.ChartPotential(2.0 * quadratic.values + smooth.values + 1.0, quadratic.spacing, quadratic.radius)
    total = cu.mollify_at(sum_chart, 0.125, points)
    parts = 2.0 * cu.mollify_at(quadratic, 0.125, points) + cu.mollify_at(smooth, 0.125, points) + 1.0
    assert np.allclose(total, parts, rtol=1e-12)
    assert np.all(total >= cu.mollify_at(quadratic, 0.125, points))


def test_mollify_sup_norm():
    smooth = cu.chart_from_catalog("smooth")
    smoothed = cu.mollify(smooth, 0.125)
    assert np.nanmax(np.abs(smoothed.values)) <= np.max(np.abs(smooth.values))


def test_mollify_jensen_transfer(quadratic):
    points = [[0.0, 0.0], [0.5, 0.5], [1.0, -0.25]]
    concave = cu.ChartPotential(np.log1p(quadratic.values), quadratic.spacing, quadratic.radius)
    lhs = np.log1p(cu.mollify_at(quadratic, 0.25, points))
    rhs = cu.mollify_at(concave, 0.25, points)
    assert np.all(lhs >= rhs - 1e-12)


def test_mollify_pole(log_pole):
    r = 0.25
    value = cu.mollify_at(log_pole, r, [[0.0, 0.0]])[0]
    tail = cu.eta_constant(1) - 6.0 * LOG2
    assert np.isfinite(value)
    assert np.isclose(value, 2.0 * np.log(r) - 2.0 * tail, rtol=0.0, atol=0.1)


@pytest.mark.parametrize("r", [0.1, 1.0, 0.0])
def test_mollify_resolution(quadratic, r):
    with pytest.raises(ResolutionError):
        cu.mollify_at(quadratic, r, [[0.0, 0.0]])


def test_mollify_leaves_domain(quadratic):
    with pytest.raises(ResolutionError):
        cu.mollify_at(quadratic, 0.125, [[3.90625, 0.0]])


"""
Sups and Lelong proxy
"""


@pytest.mark.parametrize("r", [0.125, 0.25, 0.375])
def test_sup_log_pole(log_pole, r):
    assert np.isclose(cu.sup_at(log_pole, r, [[0.0, 0.0]])[0], 2.0 * np.log(r), rtol=1e-14)


def test_sup_along_ray(quadratic):
    assert cu.sup_at(quadratic, 0.25, [[0.5, 0.0]])[0] == 0.5625


def test_sup_convolution_monotone(quadratic):
    small = cu.sup_convolution(quadratic, 0.125).values
    large = cu.sup_convolution(quadratic, 0.25).values
    defined = np.isfinite(small) & np.isfinite(large)
    assert np.all(large[defined] >= small[defined])
    assert np.all(small[defined] >= quadratic.values[defined])


def test_sup_below_grid_step(quadratic):
    with pytest.raises(ResolutionError):
        cu.sup_at(quadratic, 0.01, [[0.0, 0.0]])


@pytest.mark.parametrize("coefficient, nu", [(1.0, 2.0), (1.5, 3.0), (0.25, 0.5)])
def test_lelong_log_pole(coefficient, nu):
    T = cu.chart_from_catalog("log_pole", coefficient=coefficient)
    for r in [0.125, 0.25, 0.375]:
        assert np.isclose(cu.lelong_proxy(T, [0.0, 0.0], r), nu, rtol=1e-12)


@pytest.mark.parametrize("chart", ["shifted_pole", "smooth"], indirect=True)
def test_lelong_monotone(chart):
    nus = [cu.lelong_proxy(chart, [0.0, 0.0], r) for r in [0.375, 0.25, 0.125]]
    assert np.all(np.diff(nus) <= 1e-12)


def test_lelong_smooth_is_small():
    T = cu.chart_from_catalog("smooth")
    assert cu.lelong_proxy(T, [0.0, 0.0], 0.03125) < 0.3


@pytest.mark.parametrize("r", [0.5, 0.75, 0.0])
def test_lelong_radius(log_pole, r):
    with pytest.raises(ResolutionError):
        cu.lelong_proxy(log_pole, [0.0, 0.0], r)


def test_lelong_two_variables():
    T = cu.chart_from_catalog("log_pole", m=2, radius=0.25, spacing=0.0625)
    assert T.values.shape == (33,) * 4
    assert np.isclose(cu.lelong_proxy(T, [0.0, 0.0, 0.0, 0.0], 0.0625), 2.0, rtol=1e-12)
    assert np.isclose(cu.lelong_proxy(T, [0j, 0j], 0.0625), 2.0, rtol=1e-12)


"""
Comparison of sups and mollification
"""


def test_comparison_log_pole(log_pole):
    check = cu.comparison_check(log_pole, [0.0, 0.0], 0.25)
    assert np.isclose(check.gap_half, 2.0 * LOG2, rtol=1e-12)
    assert np.isclose(check.nu, 2.0, rtol=1e-12)
    assert np.isclose(check.gap_half, LOG2 * check.nu, rtol=1e-12)
    assert check.half_ok
    assert check.moll_ok
    assert 0.0 < check.gap_moll < check.eta * check.nu


@pytest.mark.parametrize("chart", ["shifted_pole", "quadratic", "smooth", "mixture"], indirect=True)
@pytest.mark.parametrize("r", [0.125, 0.25])
def test_comparison_holds(chart, r):
    check = cu.comparison_check(chart, [0.0, 0.0], r)
    assert check.half_ok
    assert check.moll_ok
    assert check.gap_half >= 0.0


def test_comparison_random_mixtures():
    rng = np.random.default_rng(11)
    for _ in range(20):
        components = [
            {
                "kind": kind,
                "weight": float(rng.uniform(0.2, 2.0)),
                "params": {"center": rng.uniform(-0.5, 0.5, (1, 2)).tolist()},
            }
            for kind in ("quadratic", "smooth")
        ]
        T = cu.chart_from_catalog("mixture", components=components)
        check = cu.comparison_check(T, [0.0, 0.0], 0.25)
        assert check.half_ok, components
        assert check.moll_ok, components


def test_comparison_not_psh():
    T = cu.ChartPotential.from_function(lambda z: -np.abs(z) ** 2)
    check = cu.comparison_check(T, [0.0, 0.0], 0.25)
    assert check.half_ok is None
    assert check.moll_ok is None


def test_comparison_radius(log_pole):
    with pytest.raises(ResolutionError):
        cu.comparison_check(log_pole, [0.0, 0.0], 0.5)


"""
Hessian angles and matrix Jensen
"""


def test_hessian_quadratic(quadratic):
    hessian = complex_hessian(quadratic)
    assert np.isnan(hessian[0, 10]).all()
    assert np.allclose(hessian[1:-1, 1:-1, 0, 0], 1.0, atol=1e-8)
    angles = cu.hessian_angles(quadratic)
    assert np.isclose(np.nanmin(angles), 0.25 * np.pi, atol=1e-8)
    assert np.isclose(np.nanmax(angles), 0.25 * np.pi, atol=1e-8)


def test_hessian_two_variables():
    T = cu.chart_from_catalog("quadratic", m=2, radius=0.25, spacing=0.0625)
    hessian = complex_hessian(T)
    assert np.allclose(hessian[16, 16, 16, 16], np.eye(2), atol=1e-8)
    assert np.isclose(np.nanmax(cu.hessian_angles(T)), 0.5 * np.pi, atol=1e-8)
    assert np.isclose(np.nanmax(cu.hessian_angles(T, 2.0 * np.eye(2))), 2.0 * np.arctan(2.0), atol=1e-8)


def test_matrix_jensen(quadratic):
    X, Y = quadratic.coordinates()
    field = np.zeros(X.shape + (2, 2), dtype=np.complex128)
    field[..., 0, 0] = 1.0 + X**2
    field[..., 1, 1] = 2.0 + Y**2
    field[..., 0, 1] = 0.1 * (X + 1j * Y)
    field[..., 1, 0] = 0.1 * (X - 1j * Y)
    result = cu.matrix_jensen_check(field, quadratic, np.eye(2), 2.5, 0.125, [[0.0, 0.0], [0.25, 0.0], [0.5, 0.25]])
    assert result.holds
    assert result.lhs.shape == (3,)


def test_matrix_jensen_hypothesis(quadratic):
    field = np.full(quadratic.values.shape + (1, 1), -10.0)
    with pytest.raises(HypothesisViolated):
        cu.matrix_jensen_check(field, quadratic, np.eye(1), 2.5, 0.125, [[0.0, 0.0]])


"""
Regularized maximum
"""


def test_smooth_max_gap():
    eps = 0.01
    assert np.isclose(cu.smooth_max([1.0, 1.0 - 10.0 * eps], eps), 1.0, rtol=0.0, atol=1e-14)
    assert np.isclose(cu.smooth_max([1.0 - 10.0 * eps, 1.0, 0.5], eps), 1.0, rtol=0.0, atol=1e-14)
    assert np.isclose(cu.smooth_max([1.0, 1.0 - 2.0 * eps, 1.0 - 3.0 * eps], eps), 1.0, rtol=0.0, atol=1e-14)
    equal = cu.smooth_max([0.3, 0.3], eps)
    assert 0.3 < equal <= 0.3 + eps


def test_smooth_max_drops_minus_infinity():
    values = np.array([0.5, -2.0, 3.0])
    result = cu.smooth_max([values, np.full(3, -np.inf), [-np.inf, 0.0, -np.inf]], 0.1)
    assert np.allclose(result, [0.5, 0.0, 3.0], rtol=0.0, atol=1e-14)


def test_smooth_max_single_and_errors():
    values = np.array([1.0, 2.0])
    assert np.array_equal(cu.smooth_max([values], 0.1), values)
    with pytest.raises(ValueError):
        cu.smooth_max([], 0.1)
    with pytest.raises(ValueError):
        cu.smooth_max([values, values], 0.0)


reals = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
widths = st.floats(min_value=1e-3, max_value=1.0)


@given(st.lists(reals, min_size=2, max_size=5), widths)
@settings(max_examples=200, deadline=None)
def test_smooth_max_bounds(values, eps):
    result = float(cu.smooth_max(values, eps))
    assert max(values) - 1e-12 <= result <= max(values) + eps + 1e-12


@given(
    reals,
    st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=3, max_size=5),
    widths,
    st.randoms(use_true_random=False),
)
@settings(max_examples=200, deadline=None)
def test_smooth_max_symmetric(base, offsets, eps, random):
    # inputs closer than 2 eps so that the smoothing is active
    values = [base + eps * offset for offset in offsets]
    shuffled = list(values)
    random.shuffle(shuffled)
    assert np.isclose(cu.smooth_max(values, eps), cu.smooth_max(shuffled, eps), rtol=0.0, atol=1e-12)
    assert np.isclose(cu.smooth_max(values, eps), cu.smooth_max(values[::-1], eps), rtol=0.0, atol=1e-12)


@given(reals, reals, reals, reals, st.floats(min_value=0.0, max_value=1.0), widths)
@settings(max_examples=200, deadline=None)
def test_smooth_max_monotone_and_convex(a, b, c, d, t, eps):
    assert cu.smooth_max([a + abs(d), b, c], eps) >= cu.smooth_max([a, b, c], eps) - 1e-12
    x, y = np.array([a, b, c]), np.array([c, d, a])
    mixed = cu.smooth_max(t * x + (1.0 - t) * y, eps)
    assert mixed <= t * cu.smooth_max(x, eps) + (1.0 - t) * cu.smooth_max(y, eps) + 1e-12


@pytest.fixture(scope="module")
def gluing_case():
    inner = cu.chart_from_catalog("quadratic", coefficient=1.0, offset=1.0)
    outer = cu.chart_from_catalog("quadratic", coefficient=2.0, offset=-1.5)
    distances = inner.distances()
    return inner, outer, distances < 2.0, distances > 1.0


def test_glue_quadratics(gluing_case):
    inner, outer, inner_mask, outer_mask = gluing_case
    glued = cu.regularized_max([(inner_mask, inner), (outer_mask, outer)], 0.1, inner.coordinates())
    assert glued.name == "glued"
    assert np.all(np.isfinite(glued.values))
    near = inner.distances() <= 1.0
    far = inner.distances() >= 2.0
    assert np.allclose(glued.values[near], inner.values[near], rtol=0.0, atol=1e-12)
    assert np.allclose(glued.values[far], outer.values[far], rtol=0.0, atol=1e-12)
    both = np.maximum(inner.values, outer.values)
    assert np.all(glued.values >= both - 1e-12)
    assert np.all(glued.values <= both + 0.1 + 1e-12)
    assert np.nanmax(cu.hessian_angles(glued)) < 0.25 * np.pi + 1e-6


def test_glue_arrays(gluing_case):
    inner, outer, inner_mask, outer_mask = gluing_case
    # the outer edge of the annulus is the edge of the union and needs no separation
    annulus = outer_mask & (inner.distances() < 3.0)
    glued = cu.regularized_max([(inner_mask, inner.values), (annulus, outer.values)], 0.1)
    assert isinstance(glued, np.ndarray)
    assert np.isnan(glued[0, 0])
    between = annulus & ~inner_mask
    assert np.array_equal(glued[between], outer.values[between])


def test_glue_separation_violated(gluing_case):
    inner, _, inner_mask, outer_mask = gluing_case
    high = cu.chart_from_catalog("quadratic", coefficient=2.0, offset=5.0)
    with pytest.raises(SeparationViolated) as excinfo:
        cu.regularized_max([(inner_mask, inner), (outer_mask, high)], 0.1, inner.coordinates())
    location = excinfo.value.location
    assert len(location) == 2
    assert 1.0 <= np.hypot(*location) <= 1.05


"""
Chart catalog
"""


def test_available_charts():
    assert set(cu.available_charts()) >= {"log_pole", "mixture", "quadratic", "shifted_pole"}


def test_load_charts():
    shifted = cu.load_chart("shifted_pole")
    assert shifted.psh
    assert shifted.value_at([0.0625, 0.0]) == cu.POLE_FLOOR
    mixture = cu.load_chart("mixture")
    assert len(mixture.poles) == 1


@pytest.mark.parametrize(
    "alldata, match",
    [({"kind": "cone"}, "kind"), ({"kind": "log_pole", "radius": "big"}, "parameters"), ([1, 2], "mapping")],
)
def test_bad_chart_description(alldata, match):
    with pytest.raises(ParseError, match=match):
        chart_from_dict(alldata)


def test_unknown_catalog_kind():
    with pytest.raises(ParseError):
        cu.chart_from_catalog("cone")
