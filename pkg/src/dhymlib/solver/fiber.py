""" Discrete fiber averaging of horizontal forms

A fiber measure is a finite set of atoms. Each atom carries a horizontal form,
the relative eigenvalues of the vertical form and a weight. The average of the
horizontal forms is taken against the vertical masses w Im prod(lambda + i).
"""

from collections import namedtuple
from dataclasses import dataclass, field
import logging

import numpy as np

from ..errors import BadMeasure, HypothesisViolated
from ..hermitian.angles import RelativePair, angle_Q, arccot, inverse_sqrt
from ..hermitian.sampling import pair_from_angles, random_angles, random_positive

logger = logging.getLogger(__name__)

JensenResult = namedtuple("JensenResult", ["lhs", "rhs", "holds"])


@dataclass(frozen=True, eq=False)
class FiberAtom:
    """One point of a fiber measure

    Parameters
    ----------

    horizontal : numpy.ndarray
        m x m Hermitian form. Ignored for truncated atoms, which carry K times
        the metric instead.
    vertical : numpy.ndarray
        Relative eigenvalues of the vertical form, length m.
    weight : float
    truncated : bool
    """

    horizontal: np.ndarray = field(repr=False)
    vertical: np.ndarray
    weight: float
    truncated: bool = False

    @property
    def vertical_product(self):
        return complex(np.prod(np.asarray(self.vertical, dtype=float) + 1j))

    @property
    def vertical_angle(self):
        return float(np.sum(arccot(np.asarray(self.vertical, dtype=float))))


class FiberMeasure:
    """Weighted atoms over a fixed horizontal metric

    Parameters
    ----------

    atoms : list of FiberAtom
    metric : numpy.ndarray
        Positive m x m Hermitian matrix.
    constants : TwistedConstants
        Provides K, zeta_K and theta_tilde0.

    Raises
    ------

    BadMeasure
        Empty measure, nonpositive weight or nonpositive vertical mass.
    """

    def __init__(self, atoms, metric, constants):
        self.atoms = tuple(atoms)
        self.metric = np.asarray(metric, dtype=np.complex128)
        self.constants = constants
        if not self.atoms:
            raise BadMeasure("fiber measure without atoms")
        m = self.metric.shape[0]
        inverse_sqrt(self.metric)
        for i, atom in enumerate(self.atoms):
            if not atom.weight > 0.0:
                raise BadMeasure(f"atom {i} has weight {atom.weight}")
            if len(atom.vertical) != m:
                raise BadMeasure(f"atom {i} has {len(atom.vertical)} vertical eigenvalues, expected {m}")
            if not atom.vertical_product.imag > 0.0:
                raise BadMeasure(f"atom {i} has vertical mass {atom.vertical_product.imag:.3e}")

    @property
    def dim(self):
        return self.metric.shape[0]

    def horizontal(self, atom):
        return self.constants.K * self.metric if atom.truncated else np.asarray(atom.horizontal, dtype=np.complex128)

    @property
    def masses(self):
        return np.array([a.weight * a.vertical_product.imag for a in self.atoms])

    @property
    def total(self):
        """Total vertical mass, sum of w Im prod(lambda + i)"""
        return float(self.masses.sum())

    @property
    def probabilities(self):
        masses = self.masses
        return masses / masses.sum()

    @property
    def truncated_fraction(self):
        return float(sum(p for p, a in zip(self.probabilities, self.atoms) if a.truncated))

    def vertical_phase(self):
        """Argument of sum w prod(lambda + i)"""
        return float(np.angle(sum(a.weight * a.vertical_product for a in self.atoms)))

    def normalization_defect(self):
        """Distance between the vertical phase and zeta_K"""
        return abs(self.vertical_phase() - self.constants.zeta_K)

    def budget_violations(self, atol=1e-12):
        """Indices of atoms with Q(horizontal) + Q(vertical) above theta_tilde0

        Truncated atoms are checked on their vertical angle only.
        """
        theta_tilde0 = self.constants.theta_tilde0
        found = []
        for i, atom in enumerate(self.atoms):
            vertical = atom.vertical_angle
            if atom.truncated:
                total = vertical
            else:
                total = angle_Q(RelativePair(self.metric, atom.horizontal), self.dim) + vertical
            if total > theta_tilde0 + atol:
                found.append(i)
        return found

    def __len__(self):
        return len(self.atoms)


def fiber_average(mu):
    """Average of the horizontal forms against the vertical masses

    Parameters
    ----------

    mu : FiberMeasure

    Returns
    -------

    numpy.ndarray
        m x m Hermitian matrix.
    """
    result = sum(p * mu.horizontal(atom) for p, atom in zip(mu.probabilities, mu.atoms))
    return 0.5 * (result + result.conj().T)


def average_angle(mu):
    """Q functional of the fiber average relative to the measure metric"""
    return angle_Q(RelativePair(mu.metric, fiber_average(mu)), mu.dim)


def truncated_cot_bound(constants, fraction):
    """Lower bound of cot(Q) - cot(theta_tilde0) for a truncated average

    The inverse of 1 / a + a fraction / (1 + cot^2(theta_tilde0)) with
    a = cot(theta0) - cot(theta_tilde0).
    """
    a = constants.cot_gap
    cot_tilde = 1.0 / np.tan(constants.theta_tilde0)
    return 1.0 / (1.0 / a + a * fraction / (1.0 + cot_tilde**2))


def truncated_fiber_bound(mu, fraction):
    """Q of the average of a measure where some atoms are truncated

    Parameters
    ----------

    mu : FiberMeasure
    fraction : float
        Replaced mass fraction in [0, 1], at least the probability mass of the
        truncated atoms.

    Returns
    -------

    float
        Q of the average, which satisfies
        ``cot(Q) - cot(theta_tilde0) >= truncated_cot_bound(constants, fraction)``
        when the atoms respect their budget and the vertical masses are
        normalized.
    """
    if not 0.0 <= fraction <= 1.0:
        raise HypothesisViolated(f"mass fraction {fraction} not in [0, 1]")
    if fraction < mu.truncated_fraction - 1e-12:
        raise HypothesisViolated(
            f"mass fraction {fraction} below the truncated mass {mu.truncated_fraction:.6g} of the measure"
        )
    return average_angle(mu)


def jensen_check(matrices, weights, metric, theta_tilde0, rtol=1e-9):
    """Discrete Jensen inequality for 1 / (cot Q - cot theta_tilde0)

    Parameters
    ----------

    matrices : list of numpy.ndarray
        Hermitian forms with Q below ``theta_tilde0``.
    weights : array_like
        Positive weights, normalized internally.
    metric : numpy.ndarray
    theta_tilde0 : float
    rtol : float

    Returns
    -------

    JensenResult
        Value at the average, average of the values and whether
        ``lhs <= rhs`` within ``rtol``.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(matrices),) or np.any(weights <= 0.0):
        raise BadMeasure("weights must be positive, one per matrix")
    weights = weights / weights.sum()
    cot_tilde = 1.0 / np.tan(theta_tilde0)
    n = np.asarray(metric).shape[0]
    values = []
    for i, matrix in enumerate(matrices):
        q = angle_Q(RelativePair(metric, matrix), n)
        if not q < theta_tilde0:
            raise HypothesisViolated(f"matrix {i} has Q = {q:.6g} not below {theta_tilde0:.6g}")
        values.append(1.0 / (1.0 / np.tan(q) - cot_tilde))
    average = sum(w * np.asarray(matrix, dtype=np.complex128) for w, matrix in zip(weights, matrices))
    q_avg = angle_Q(RelativePair(metric, 0.5 * (average + average.conj().T)), n)
    lhs = 1.0 / (1.0 / np.tan(q_avg) - cot_tilde)
    rhs = float(np.dot(weights, values))
    return JensenResult(float(lhs), rhs, bool(lhs <= rhs + rtol * max(1.0, abs(rhs))))


def _vertical_from_angle(rng, m, angle):
    return 1.0 / np.tan(random_angles(rng, m, angle))


def random_fiber_measure(rng, constants, atoms=8, truncated=0, metric=None):
    """Random measure respecting the atom budget and the vertical normalization

    Half of the atoms have a vertical angle above zeta_K and half below. The
    weights of the lower group are rescaled so that sum w prod(lambda + i) has
    argument zeta_K. Horizontal forms use a random share of the remaining budget
    theta_tilde0 - Q(vertical).

    Parameters
    ----------

    rng : numpy.random.Generator
    constants : TwistedConstants
    atoms : int
    truncated : int
        Number of atoms marked as truncated.
    metric : numpy.ndarray, optional
        Horizontal metric, random by default.

    Returns
    -------

    FiberMeasure
    """
    if atoms < 1 or not 0 <= truncated <= atoms:
        raise HypothesisViolated(f"need atoms >= 1 and 0 <= truncated <= atoms, got {atoms}, {truncated}")
    m = constants.m
    zeta = constants.zeta_K
    theta_tilde0 = constants.theta_tilde0
    if metric is None:
        metric = random_positive(rng, m)

    if atoms == 1:
        verticals = [np.full(m, constants.K)]
    else:
        upper = atoms // 2
        verticals = [
            _vertical_from_angle(rng, m, zeta + (theta_tilde0 - zeta) * rng.uniform(0.05, 0.95)) for _ in range(upper)
        ]
        verticals += [_vertical_from_angle(rng, m, zeta * rng.uniform(0.05, 0.95)) for _ in range(atoms - upper)]
    weights = rng.uniform(0.5, 2.0, atoms)

    if atoms > 1:
        products = np.array([np.prod(v + 1j) for v in verticals])
        signed = weights * np.abs(products) * np.sin(np.angle(products) - zeta)
        above = signed > 0.0
        weights[~above] *= signed[above].sum() / -signed[~above].sum()

    flags = np.zeros(atoms, dtype=bool)
    flags[rng.choice(atoms, size=truncated, replace=False)] = True
    result = []
    for vertical, weight, flag in zip(verticals, weights, flags):
        room = theta_tilde0 - float(np.sum(arccot(vertical)))
        angles = random_angles(rng, m, room * rng.uniform(0.3, 1.0))
        horizontal = pair_from_angles(rng, metric, angles).form
        result.append(FiberAtom(horizontal, vertical, float(weight), bool(flag)))
    return FiberMeasure(result, metric, constants)
