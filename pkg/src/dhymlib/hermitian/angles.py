""" Angle functionals of Hermitian pairs

A pair (A, B) is made of a positive definite Hermitian metric A and a Hermitian
form B. All functionals depend only on the relative eigenvalues, i.e. the
spectrum of A^{-1}B, sorted in ascending order.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
import logging

import numpy as np
from scipy import linalg

from ..errors import BadOrder, DegenerateFrame, HypothesisViolated, MetricNotPositive

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12


def arccot(x):
    """Inverse cotangent with values in (0, pi)

    Continuous and decreasing on the whole real line, so there is no jump at 0
    as with ``arctan(1 / x)``.

    Parameters
    ----------

    x : float or numpy.ndarray
        Argument(s).

    Returns
    -------

    float or numpy.ndarray
        pi/2 - arctan(x).

    Examples
    --------

    >>> arccot(1.0)  # doctest: +ELLIPSIS
    0.785398...
    """
    return 0.5 * np.pi - np.arctan(x)


def is_hermitian(matrix, rtol=HERMITIAN_RTOL):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.linalg.norm(matrix - matrix.conj().T) <= rtol * np.linalg.norm(matrix)


def inverse_sqrt(metric):
    """Hermitian inverse square root of a positive definite matrix

    Raises
    ------

    MetricNotPositive
        If the smallest eigenvalue is not positive.
    """
    values, vectors = linalg.eigh(metric)
    if values[0] <= 0.0:
        raise MetricNotPositive(f"metric has smallest eigenvalue {values[0]:.3e}")
    return (vectors * (1.0 / np.sqrt(values))) @ vectors.conj().T


@dataclass(frozen=True, eq=False)
class RelativePair:
    """Metric ``A`` (positive definite) and form ``B`` (Hermitian)

    Parameters
    ----------

    metric : array_like
        n x n Hermitian positive definite matrix.
    form : array_like
        n x n Hermitian matrix.
    """

    metric: np.ndarray
    form: np.ndarray = field(repr=False)

    def __post_init__(self):
        metric = np.atleast_2d(np.asarray(self.metric, dtype=np.complex128))
        form = np.atleast_2d(np.asarray(self.form, dtype=np.complex128))
        if metric.shape != form.shape or metric.shape[0] != metric.shape[1]:
            raise ValueError(f"metric {metric.shape} and form {form.shape} must be square of same size")
        if not is_hermitian(metric):
            raise MetricNotPositive("metric is not Hermitian")
        if not is_hermitian(form):
            raise HypothesisViolated("form is not Hermitian")
        # exact symmetrization below the tolerance
        metric = 0.5 * (metric + metric.conj().T)
        form = 0.5 * (form + form.conj().T)
        if linalg.eigvalsh(metric)[0] <= 0.0:
            raise MetricNotPositive("metric is not positive definite")
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "form", form)

    @property
    def dim(self):
        return self.metric.shape[0]

    @cached_property
    def reduced_form(self):
        """A^{-1/2} B A^{-1/2}, the form seen in an A-orthonormal frame"""
        s = inverse_sqrt(self.metric)
        reduced = s @ self.form @ s
        return 0.5 * (reduced + reduced.conj().T)

    @cached_property
    def eigenvalues(self):
        values = linalg.eigvalsh(self.reduced_form)
        values.setflags(write=False)
        return values

    def shifted(self, eps):
        """Pair (A, B + eps A)"""
        return RelativePair(self.metric, self.form + eps * self.metric)

    def congruent(self, s):
        """Pair (S* A S, S* B S)"""
        s = np.asarray(s, dtype=np.complex128)
        return RelativePair(s.conj().T @ self.metric @ s, s.conj().T @ self.form @ s)

    def __str__(self):
        return f"RelativePair(n={self.dim}, eigenvalues={np.array2string(self.eigenvalues, precision=4)})"


@dataclass(frozen=True)
class AngleBudget:
    """Angle constants of a subsolution problem

    Parameters
    ----------

    theta0 : float
        Target phase in (0, pi).
    Theta0 : float
        Upper bound of the Q functional, in (theta0, pi).
    K : float, optional
        Vertical eigenvalue of the product subsolution.
    m : int, optional
        Vertical dimension, used in ``zeta_K = m arccot(K)``.
    """

    theta0: float
    Theta0: float
    K: float = None
    m: int = 0

    @property
    def zeta_K(self):
        if self.K is None:
            return 0.0
        return float(self.m * arccot(self.K))

    @property
    def theta_tilde0(self):
        return self.theta0 + self.zeta_K

    def violations(self, n):
        """List of violated invariants for dimension ``n``"""
        found = []
        if not 0.0 < self.theta0 < np.pi:
            found.append("theta0 in (0, pi)")
        if not self.theta0 < self.Theta0 < np.pi:
            found.append("Theta0 in (theta0, pi)")
        if not self.Theta0 - self.theta0 < (np.pi - self.Theta0) / n:
            found.append("Theta0 - theta0 < (pi - Theta0) / n")
        if self.K is not None:
            if not K_lower_bound(n, self.Theta0) < self.K < 1.0 / np.tan(self.Theta0 - self.theta0):
                found.append("cot((pi - Theta0) / n) < K < cot(Theta0 - theta0)")
            if not self.theta_tilde0 < np.pi:
                found.append("theta_tilde0 < pi")
        return found

    def validate(self, n):
        found = self.violations(n)
        if found:
            raise HypothesisViolated("angle budget violates: " + "; ".join(found))
        return self


def K_lower_bound(n, angle):
    """cot((pi - angle) / n)"""
    return 1.0 / np.tan((np.pi - angle) / n)


def angle_budget(n, theta0, m=None, Theta0=None, K=None):
    """Build a valid AngleBudget

    ``Theta0`` defaults to the middle of (theta0, (pi + n theta0) / (n + 1)) which
    enforces Theta0 - theta0 < (pi - Theta0) / n. ``K`` defaults to the cotangent of
    the middle of the admissible angle interval (Theta0 - theta0, (pi - Theta0) / n).
    """
    if Theta0 is None:
        Theta0 = 0.5 * (theta0 + (np.pi + n * theta0) / (n + 1))
    if K is None:
        K = 1.0 / np.tan(0.5 * ((Theta0 - theta0) + (np.pi - Theta0) / n))
    budget = AngleBudget(float(theta0), float(Theta0), float(K), n if m is None else m)
    return budget.validate(n)


def _check_order(n, k):
    if not 1 <= k <= n:
        raise BadOrder(f"order k={k} outside 1..{n}")


def q_from_eigenvalues(eigenvalues, k):
    """Q functional from ascending eigenvalues (last axis)"""
    eigenvalues = np.asarray(eigenvalues)
    _check_order(eigenvalues.shape[-1], k)
    return np.sum(arccot(eigenvalues[..., :k]), axis=-1)


def p_from_eigenvalues(eigenvalues, k):
    """P functional from ascending eigenvalues (last axis), P_1 = 0"""
    eigenvalues = np.asarray(eigenvalues)
    _check_order(eigenvalues.shape[-1], k)
    if k == 1:
        return np.zeros(eigenvalues.shape[:-1])
    return q_from_eigenvalues(eigenvalues, k - 1)


def eigenvalues_rel(pair):
    """Ascending eigenvalues of A^{-1}B"""
    return pair.eigenvalues


def angle_Q(pair, k):
    """Largest sum of k arccot of relative eigenvalues"""
    return float(q_from_eigenvalues(pair.eigenvalues, k))


def angle_P(pair, k):
    """Q functional at order k - 1, with P_1 = 0"""
    return float(p_from_eigenvalues(pair.eigenvalues, k))


def angle_Q_bruteforce(pair, k):
    """Q by enumeration of every k-subset of eigenvalues"""
    _check_order(pair.dim, k)
    angles = arccot(pair.eigenvalues)
    return max(float(sum(angles[list(subset)])) for subset in combinations(range(pair.dim), k))


def in_gamma(pair, budget, margin=0.0):
    """Membership in the cone P_n < theta0 and Q_n < Theta0

    Parameters
    ----------

    pair : RelativePair
    budget : AngleBudget
    margin : float
        Both inequalities are required with this slack, default 0 (strict).
    """
    n = pair.dim
    return angle_P(pair, n) < budget.theta0 - margin and angle_Q(pair, n) < budget.Theta0 - margin


def random_frames(rng, n, k, trials):
    """Random orthonormal k-frames in C^n, shape (trials, n, k)"""
    z = rng.standard_normal((trials, n, k)) + 1j * rng.standard_normal((trials, n, k))
    q, r = np.linalg.qr(z)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    if diag.min() < 1e-10:
        raise DegenerateFrame(f"random frame lost rank (|R_ii| = {diag.min():.2e})")
    return q


def variational_Q(pair, k, trials, seed, extra_frames=None):
    """Lower estimate of Q over random orthonormal frames

    For every frame U the form is restricted to span(U) and the arccot of the
    restricted eigenvalues are summed. By eigenvalue interlacing the result never
    exceeds ``angle_Q(pair, k)``, and frames spanned by the k lowest eigenvectors
    attain it.

    Parameters
    ----------

    pair : RelativePair
        Pair whose metric is the identity.
    k : int
        Frame size.
    trials : int
        Number of random frames.
    seed : int
        Seed of the frame generator.
    extra_frames : list of numpy.ndarray, optional
        Additional n x k frames tested as given (orthonormalized first).

    Returns
    -------

    float
        Maximum over tested frames.
    """
    n = pair.dim
    _check_order(n, k)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if np.linalg.norm(pair.metric - np.eye(n)) > 1e-10:
        raise HypothesisViolated("variational_Q needs the identity metric, reduce the pair first")

    rng = np.random.default_rng(seed)
    frames = random_frames(rng, n, k, trials)
    if extra_frames:
        extra = np.stack([np.asarray(f, dtype=np.complex128).reshape(n, k) for f in extra_frames])
        q, r = np.linalg.qr(extra)
        if np.abs(np.diagonal(r, axis1=-2, axis2=-1)).min() < 1e-10:
            raise DegenerateFrame("extra frame is rank deficient")
        frames = np.concatenate([frames, q])

    restricted = np.conj(np.swapaxes(frames, -1, -2)) @ pair.form @ frames
    restricted = 0.5 * (restricted + np.conj(np.swapaxes(restricted, -1, -2)))
    values = np.linalg.eigvalsh(restricted)
    return float(np.max(np.sum(arccot(values), axis=-1)))


def eigen_frame(pair, k):
    """Frame spanned by the k lowest eigenvectors of the reduced form"""
    _, vectors = linalg.eigh(pair.reduced_form)
    return vectors[:, :k]


def product_subsolution(eigenvalues, K, m):
    """Eigenvalues of the product subsolution and its Q value

    The horizontal eigenvalues are completed by ``m`` vertical eigenvalues equal to
    ``K``; the Q value is Q(eigenvalues) + m arccot(K).
    """
    eigenvalues = np.sort(np.asarray(eigenvalues, dtype=float))
    full = np.sort(np.concatenate([eigenvalues, np.full(m, float(K))]))
    return full, float(np.sum(arccot(full)))


def twisted_K_lower_bound(n, theta0):
    """Threshold above which K gives a twisted subsolution, cot((pi - theta0) / n)"""
    return K_lower_bound(n, theta0)


def family_threshold_ok(eigenvalues, n, theta0):
    """Class inequality of a test family: every eigenvalue above cot(theta0 / n)"""
    return bool(np.all(np.asarray(eigenvalues) > 1.0 / np.tan(theta0 / n)))


def small_radius_limit(eigenvalues, s):
    """s * sum arccot(s lambda), which tends to sum 1/lambda as s grows"""
    return float(s * np.sum(arccot(s * np.asarray(eigenvalues, dtype=float))))
