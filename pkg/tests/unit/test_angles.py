""" unit tests angles.py functions
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import dhymlib.hermitian as hm
from dhymlib.errors import BadOrder, HypothesisViolated, MetricNotPositive
from dhymlib.hermitian.angles import AngleBudget, inverse_sqrt
from dhymlib.hermitian.sampling import random_pair, random_pair_in_gamma, random_positive, random_psd, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=5)

"""
Pairs and eigenvalues
"""


@pytest.mark.parametrize(
    "metric, form, expected",
    [
        (np.eye(2), np.zeros((2, 2)), [0.0, 0.0]),
        (np.eye(2), np.diag([1.0, 2.0]), [1.0, 2.0]),
        (2.0 * np.eye(2), np.diag([2.0, 4.0]), [1.0, 2.0]),
        (np.diag([1.0, 4.0]), np.diag([-3.0, 2.0]), [-3.0, 0.5]),
    ],
)
def test_eigenvalues_rel(metric, form, expected):
    values = hm.eigenvalues_rel(hm.RelativePair(metric, form))
    assert np.allclose(values, expected, rtol=1e-12, atol=1e-14)


def test_pair_rejects_indefinite_metric():
    with pytest.raises(MetricNotPositive):
        hm.RelativePair(np.diag([1.0, -1.0]), np.eye(2))


def test_pair_rejects_non_hermitian_form():
    with pytest.raises(HypothesisViolated):
        hm.RelativePair(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_pair_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        hm.RelativePair(np.eye(2), np.eye(3))


def test_inverse_sqrt():
    metric = np.array([[2.0, 1.0j], [-1.0j, 3.0]])
    s = inverse_sqrt(metric)
    assert np.allclose(s @ metric @ s, np.eye(2), atol=1e-13)


@given(seeds, dims)
@settings(max_examples=40, deadline=None)
def test_congruence_invariance(seed, n):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, n)
    s = random_unitary(rng, n) * rng.uniform(0.5, 2.0, n)
    congruent = pair.congruent(s)
    assert np.allclose(congruent.eigenvalues, pair.eigenvalues, rtol=1e-8, atol=1e-9)


"""
Angle functionals
"""


@pytest.mark.parametrize("x, value", [(0.0, 0.5 * np.pi), (1.0, 0.25 * np.pi), (-1.0, 0.75 * np.pi)])
def test_arccot(x, value):
    assert np.isclose(hm.arccot(x), value, rtol=1e-15)


def test_arccot_has_no_jump():
    x = np.array([-1e-12, 0.0, 1e-12])
    values = hm.arccot(x)
    assert np.all(np.diff(values) < 0.0)
    assert np.all(np.abs(values - 0.5 * np.pi) < 1e-11)


def test_angle_Q_zero_form():
    assert np.isclose(hm.angle_Q(hm.RelativePair(np.eye(2), np.zeros((2, 2))), 2), np.pi, rtol=1e-15)


@pytest.mark.parametrize("m, K", [(1, 0.5), (2, 1.3), (3, 4.0)])
def test_angle_Q_vertical_block(m, K):
    pair = hm.RelativePair(np.eye(m), K * np.eye(m))
    assert np.isclose(hm.angle_Q(pair, m), m * hm.arccot(K), rtol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_angle_Q_bruteforce(k):
    rng = np.random.default_rng(2024 + k)
    pair = random_pair(rng, 4)
    assert np.isclose(hm.angle_Q(pair, k), hm.angle_Q_bruteforce(pair, k), rtol=0.0, atol=1e-14)


def test_angle_P():
    pair = hm.RelativePair(np.eye(3), np.eye(3))
    assert hm.angle_P(pair, 1) == 0.0
    assert np.isclose(hm.angle_P(pair, 3), 0.5 * np.pi, rtol=1e-15)


@pytest.mark.parametrize("k", [0, 4])
def test_bad_order(k):
    with pytest.raises(BadOrder):
        hm.angle_Q(hm.RelativePair(np.eye(3), np.eye(3)), k)


@given(seeds, dims)
@settings(max_examples=60, deadline=None)
def test_order_monotonicity(seed, n):
    pair = random_pair(np.random.default_rng(seed), n)
    q = [hm.angle_Q(pair, k) for k in range(1, n + 1)]
    p = [hm.angle_P(pair, k) for k in range(1, n + 1)]
    assert all(a <= b for a, b in zip(q, q[1:]))
    assert all(a <= b for a, b in zip(p, p[1:]))
    # Q_n - P_n is the angle of the largest eigenvalue
    assert np.isclose(q[-1] - p[-1], hm.arccot(pair.eigenvalues[-1]), atol=1e-14)


@given(seeds, dims)
@settings(max_examples=60, deadline=None)
def test_monotonicity(seed, n):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, n)
    bigger = hm.RelativePair(pair.metric, pair.form + random_psd(rng, n))
    for k in range(1, n + 1):
        assert hm.angle_Q(bigger, k) <= hm.angle_Q(pair, k) + 1e-12
        assert hm.angle_P(bigger, k) <= hm.angle_P(pair, k) + 1e-12


@given(seeds, st.integers(min_value=2, max_value=5), st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=60, deadline=None)
def test_cot_concavity(seed, n, s):
    rng = np.random.default_rng(seed)
    metric = random_positive(rng, n)
    first = random_pair_in_gamma(rng, n, np.pi - 0.05, metric)
    second = random_pair_in_gamma(rng, n, np.pi - 0.05, metric)
    mixed = hm.RelativePair(metric, s * first.form + (1.0 - s) * second.form)
    cot = lambda pair: 1.0 / np.tan(hm.angle_Q(pair, n))
    rhs = s * cot(first) + (1.0 - s) * cot(second)
    assert hm.angle_Q(mixed, n) < np.pi
    assert cot(mixed) >= rhs - 1e-9 * max(1.0, abs(rhs))


"""
Cone membership and budgets
"""


def test_in_gamma_strict():
    pair = hm.RelativePair(np.eye(2), np.eye(2))
    assert not hm.in_gamma(pair, AngleBudget(0.5 * np.pi, 0.5 * np.pi))


def test_in_gamma_large_form():
    pair = hm.RelativePair(np.eye(2), 10.0 * np.eye(2))
    assert hm.in_gamma(pair, AngleBudget(0.5 * np.pi, 0.6 * np.pi))


def test_in_gamma_very_negative():
    pair = hm.RelativePair(np.eye(2), np.diag([-1e8, 5.0]))
    assert not hm.in_gamma(pair, AngleBudget(2.5, 3.1))


@pytest.mark.parametrize("n, theta0", [(1, 1.0), (2, 0.5 * np.pi), (3, 2.5), (4, 0.3)])
def test_angle_budget_defaults(n, theta0):
    budget = hm.angle_budget(n, theta0)
    assert budget.violations(n) == []
    assert np.isclose(budget.theta_tilde0, theta0 + n * hm.arccot(budget.K))


def test_angle_budget_bad_K():
    with pytest.raises(HypothesisViolated):
        hm.angle_budget(2, 0.5 * np.pi, Theta0=2.0, K=100.0)


def test_product_subsolution():
    full, q = hm.product_subsolution([0.5, -0.2], 2.0, 2)
    assert np.allclose(full, [-0.2, 0.5, 2.0, 2.0])
    assert np.isclose(q, hm.arccot(0.5) + hm.arccot(-0.2) + 2.0 * hm.arccot(2.0))


def test_small_radius_limit():
    eigenvalues = np.array([0.5, 2.0, 4.0])
    assert np.isclose(hm.small_radius_limit(eigenvalues, 1e6), np.sum(1.0 / eigenvalues), rtol=1e-6)


"""
Variational characterization
"""


def test_variational_coordinate_frame():
    pair = hm.RelativePair(np.eye(4), np.diag([-1.0, 0.5, 2.0, 3.0]))
    frame = np.eye(4)[:, :2]
    value = hm.variational_Q(pair, 2, 1, 0, extra_frames=[frame])
    assert np.isclose(value, hm.angle_Q(pair, 2), atol=1e-12)


def test_variational_full_frame():
    pair = random_pair(np.random.default_rng(7), 3)
    reduced = hm.RelativePair(np.eye(3), pair.reduced_form)
    assert np.isclose(hm.variational_Q(reduced, 3, 1, 11), hm.angle_Q(pair, 3), atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_variational_upper_bound(k):
    rng = np.random.default_rng(31 + k)
    pair = hm.RelativePair(np.eye(4), random_pair(rng, 4).reduced_form)
    exact = hm.angle_Q(pair, k)
    assert hm.variational_Q(pair, k, 2000, 5) <= exact + 1e-9
    attained = hm.variational_Q(pair, k, 1, 5, extra_frames=[hm.eigen_frame(pair, k)])
    assert np.isclose(attained, exact, atol=1e-10)


def test_variational_needs_identity_metric():
    with pytest.raises(HypothesisViolated):
        hm.variational_Q(hm.RelativePair(2.0 * np.eye(2), np.eye(2)), 1, 10, 0)


spectra = hnp.arrays(np.float64, st.integers(min_value=1, max_value=5), elements=st.floats(min_value=-50.0, max_value=50.0))


@given(spectra)
@settings(max_examples=100, deadline=None)
def test_diagonal_pair_angles(eigenvalues):
    eigenvalues = np.sort(eigenvalues)
    n = eigenvalues.size
    pair = hm.RelativePair(np.eye(n), np.diag(eigenvalues))
    for k in range(1, n + 1):
        q = hm.angle_Q(pair, k)
        assert np.isclose(q, hm.q_from_eigenvalues(eigenvalues, k), rtol=1e-12, atol=1e-14)
        assert 0.0 < q < k * np.pi
