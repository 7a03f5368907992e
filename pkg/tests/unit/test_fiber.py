""" unit tests constants.py and fiber.py functions
"""

import numpy as np
import pytest

import dhymlib.solver as sv
from dhymlib.errors import BadMeasure, HypothesisViolated
from dhymlib.hermitian import RelativePair, angle_Q, arccot
from dhymlib.hermitian.sampling import pair_from_angles, random_angles, random_pair_in_gamma, random_positive

"""
Twisted constants
"""


@pytest.mark.parametrize("theta0, n", [(0.3, 1), (1.0, 2), (2.0, 3), (2.9, 4)])
def test_default_constants(theta0, n):
    constants = sv.compute_constants(theta0, n)
    assert constants.m == n
    assert np.isclose(constants.zeta_K, 0.5 * (np.pi - theta0))
    assert np.isclose(constants.theta_tilde0, 0.5 * (np.pi + theta0))
    assert constants.cot_gap > 0.0


def test_constants_vertical_mass():
    constants = sv.compute_constants(1.0, 2, K=1.0)
    re, im = constants.vertical_mass
    assert np.isclose(re, 0.0, atol=1e-15)
    assert np.isclose(im, 2.0)
    data = constants.to_dict()
    assert data["I_K"] == im
    assert data["Theta0"] is None


def test_constants_vertical_dimension():
    constants = sv.compute_constants(1.0, 3, m=1, K=2.0)
    assert np.isclose(constants.zeta_K, arccot(2.0))
    assert constants.n == 3


@pytest.mark.parametrize("kwargs", [dict(theta0=1.0, n=2, K=0.1), dict(theta0=0.0, n=2), dict(theta0=1.0, n=0)])
def test_constants_hypotheses(kwargs):
    with pytest.raises(HypothesisViolated):
        sv.compute_constants(**kwargs)


def test_constants_with_upper_bound():
    constants = sv.compute_constants(1.0, 2, Theta0=1.2)
    low, high = 0.2, 0.5 * (np.pi - 1.2)
    assert np.isclose(constants.K, 1.0 / np.tan(0.5 * (low + high)))
    assert np.isclose(constants.Theta_tilde0, 1.2 + 2.0 * arccot(constants.K))
    assert constants.Theta_tilde0 < np.pi
    assert constants.theta_tilde0 < constants.Theta_tilde0


@pytest.mark.parametrize("Theta0, K", [(2.5, None), (1.2, 100.0), (0.9, None)])
def test_constants_upper_bound_hypotheses(Theta0, K):
    with pytest.raises(HypothesisViolated):
        sv.compute_constants(1.0, 2, Theta0=Theta0, K=K)


"""
Fiber measures
"""


def test_single_atom():
    rng = np.random.default_rng(1)
    constants = sv.compute_constants(1.2, 2)
    metric = random_positive(rng, 2)
    horizontal = pair_from_angles(rng, metric, random_angles(rng, 2, 1.0)).form
    mu = sv.FiberMeasure([sv.FiberAtom(horizontal, np.full(2, constants.K), 0.7)], metric, constants)
    assert np.allclose(sv.fiber_average(mu), horizontal, atol=1e-14)
    assert np.isclose(mu.normalization_defect(), 0.0, atol=1e-12)
    assert mu.budget_violations() == []


@pytest.mark.parametrize("m", [1, 2, 3])
def test_vertical_atoms_at_K(m):
    rng = np.random.default_rng(10 + m)
    theta0 = 1.4
    constants = sv.compute_constants(theta0, m)
    metric = random_positive(rng, m)
    atoms = [
        sv.FiberAtom(pair_from_angles(rng, metric, random_angles(rng, m, theta0 * rng.uniform(0.5, 1.0))).form, np.full(m, constants.K), rng.uniform(0.5, 2.0))
        for _ in range(6)
    ]
    mu = sv.FiberMeasure(atoms, metric, constants)
    assert np.isclose(atoms[0].vertical_angle, constants.zeta_K)
    assert mu.budget_violations() == []
    assert sv.average_angle(mu) <= theta0 + 1e-9


def test_average_permutation_and_scaling():
    rng = np.random.default_rng(2)
    mu = sv.random_fiber_measure(rng, sv.compute_constants(1.0, 2), atoms=6)
    shuffled = sv.FiberMeasure(reversed(mu.atoms), mu.metric, mu.constants)
    scaled = sv.FiberMeasure(
        [sv.FiberAtom(a.horizontal, a.vertical, 3.0 * a.weight, a.truncated) for a in mu.atoms], mu.metric, mu.constants
    )
    assert np.allclose(sv.fiber_average(shuffled), sv.fiber_average(mu), atol=1e-13)
    assert np.allclose(sv.fiber_average(scaled), sv.fiber_average(mu), atol=1e-13)
    assert np.isclose(scaled.total, 3.0 * mu.total)


def test_bad_measures():
    constants = sv.compute_constants(1.0, 2)
    metric = np.eye(2)
    with pytest.raises(BadMeasure):
        sv.FiberMeasure([], metric, constants)
    with pytest.raises(BadMeasure, match="weight"):
        sv.FiberMeasure([sv.FiberAtom(np.eye(2), np.ones(2), 0.0)], metric, constants)
    with pytest.raises(BadMeasure, match="vertical mass"):
        sv.FiberMeasure([sv.FiberAtom(np.eye(2), -np.ones(2), 1.0)], metric, constants)
    with pytest.raises(BadMeasure, match="expected 2"):
        sv.FiberMeasure([sv.FiberAtom(np.eye(2), np.ones(3), 1.0)], metric, constants)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fiber_average_contract(m):
    rng = np.random.default_rng(100 + m)
    for _ in range(200):
        theta0 = float(rng.uniform(0.5, 2.5))
        constants = sv.compute_constants(theta0, m)
        mu = sv.random_fiber_measure(rng, constants, atoms=int(rng.integers(1, 9)))
        assert mu.budget_violations() == []
        assert mu.normalization_defect() < 1e-9
        assert sv.average_angle(mu) <= theta0 + 1e-9


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("target", [0.0, 0.3, 1.0])
def test_truncated_bound(m, target):
    rng = np.random.default_rng(int(200 + 10 * m + 10 * target))
    checked = 0
    while checked < 100:
        theta0 = float(rng.uniform(0.5, 2.5))
        constants = sv.compute_constants(theta0, m)
        atoms = int(rng.integers(2, 9))
        truncated = 0 if target == 0.0 else int(rng.integers(1, atoms + 1))
        mu = sv.random_fiber_measure(rng, constants, atoms=atoms, truncated=truncated)
        if mu.truncated_fraction > target + 1e-12:
            continue
        q = sv.truncated_fiber_bound(mu, target)
        bound = sv.truncated_cot_bound(constants, target)
        assert 1.0 / np.tan(q) - 1.0 / np.tan(constants.theta_tilde0) >= bound - 1e-9
        checked += 1


def test_truncated_bound_at_zero_is_fiber_contract():
    constants = sv.compute_constants(1.3, 2)
    assert np.isclose(sv.truncated_cot_bound(constants, 0.0), constants.cot_gap)


def test_truncated_bound_hypotheses():
    rng = np.random.default_rng(3)
    constants = sv.compute_constants(1.0, 2)
    mu = sv.random_fiber_measure(rng, constants, atoms=4, truncated=4)
    with pytest.raises(HypothesisViolated):
        sv.truncated_fiber_bound(mu, 1.5)
    with pytest.raises(HypothesisViolated, match="truncated mass"):
        sv.truncated_fiber_bound(mu, 0.5)


def test_truncated_atoms_use_K():
    constants = sv.compute_constants(1.0, 2)
    metric = np.diag([1.0, 2.0])
    atom = sv.FiberAtom(np.zeros((2, 2)), np.full(2, constants.K), 1.0, truncated=True)
    mu = sv.FiberMeasure([atom], metric, constants)
    assert np.allclose(sv.fiber_average(mu), constants.K * metric)
    assert mu.truncated_fraction == 1.0


def test_random_measure_hypotheses():
    with pytest.raises(HypothesisViolated):
        sv.random_fiber_measure(np.random.default_rng(0), sv.compute_constants(1.0, 2), atoms=2, truncated=3)


"""
Discrete Jensen step
"""


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_jensen(n):
    rng = np.random.default_rng(300 + n)
    for _ in range(200):
        theta_tilde0 = float(rng.uniform(0.5, 3.0))
        metric = random_positive(rng, n)
        count = int(rng.integers(2, 6))
        matrices = [random_pair_in_gamma(rng, n, theta_tilde0, metric).form for _ in range(count)]
        result = sv.jensen_check(matrices, rng.uniform(0.1, 1.0, count), metric, theta_tilde0)
        assert result.holds


def test_jensen_equal_matrices():
    metric = np.eye(2)
    matrix = np.diag([1.0, 2.0])
    result = sv.jensen_check([matrix, matrix], [1.0, 3.0], metric, 2.5)
    assert np.isclose(result.lhs, result.rhs, rtol=1e-12)
    q = angle_Q(RelativePair(metric, matrix), 2)
    assert np.isclose(result.lhs, 1.0 / (1.0 / np.tan(q) - 1.0 / np.tan(2.5)))


def test_jensen_hypotheses():
    with pytest.raises(BadMeasure):
        sv.jensen_check([np.eye(2)], [1.0, 1.0], np.eye(2), 2.0)
    with pytest.raises(HypothesisViolated):
        sv.jensen_check([np.zeros((2, 2))], [1.0], np.eye(2), 2.0)
