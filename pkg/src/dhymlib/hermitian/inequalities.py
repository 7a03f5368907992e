""" Matrix inequalities for the Q functional
"""

from collections import namedtuple
import logging

import numpy as np
from scipy import linalg

from ..errors import HypothesisViolated
from .angles import RelativePair, angle_P, angle_Q, arccot, inverse_sqrt

logger = logging.getLogger(__name__)

SemicontinuityMargin = namedtuple("SemicontinuityMargin", ["lhs", "bound", "holds"])


def semicontinuity_margin(pair, theta, eps, c0=None, table=None):
    """Q of the shifted pair against the bound theta - c0 eps

    Parameters
    ----------

    pair : RelativePair
        Pair (chi, omega) with Q_n < theta.
    theta : float
        Angle bound.
    eps : float
        Shift of the form by ``eps * chi``, in (0, theta).
    c0 : float, optional
        Semicontinuity constant. Looked up in the calibration table when omitted.
    table : CalibrationTable, optional
        Table used for the lookup, the packaged one by default.

    Returns
    -------

    SemicontinuityMargin
        ``lhs`` = Q_n(chi, omega + eps chi), ``bound`` = theta - c0 eps and whether
        ``lhs < bound``.
    """
    n = pair.dim
    q = angle_Q(pair, n)
    if q >= theta:
        raise HypothesisViolated(f"Q = {q:.6g} is not below theta = {theta:.6g}")
    if not 0.0 < eps < theta:
        raise HypothesisViolated(f"eps = {eps:.3g} not in (0, theta)")
    if c0 is None:
        if table is None:
            from .calibration import default_table

            table = default_table()
        c0 = table.c0(n, theta)
    lhs = angle_Q(pair.shifted(eps), n)
    bound = theta - c0 * eps
    return SemicontinuityMargin(lhs, bound, lhs < bound)


def _lowest_relative_eigenvalue(matrix, chi3_isqrt):
    reduced = chi3_isqrt @ matrix @ chi3_isqrt
    return linalg.eigvalsh(0.5 * (reduced + reduced.conj().T))[0]


def uniform_continuity_hypotheses(chi1, chi2, chi3, sigma, atol=1e-12):
    """Names of the violated matrix inequalities (empty when all hold)"""
    chi1, chi2, chi3 = (np.asarray(c, dtype=np.complex128) for c in (chi1, chi2, chi3))
    isqrt = inverse_sqrt(chi3)
    diff = chi1 - chi2
    checks = {
        "chi1 <= 4 chi3": 4.0 * chi3 - chi1,
        "chi2 <= 4 chi3": 4.0 * chi3 - chi2,
        "chi1 - chi2 <= sigma^5 chi3": sigma**5 * chi3 - diff,
        "-sigma^5 chi3 <= chi1 - chi2": sigma**5 * chi3 + diff,
    }
    return [name for name, matrix in checks.items() if _lowest_relative_eigenvalue(matrix, isqrt) < -atol]


def uniform_continuity_check(chi1, chi2, chi3, B, sigma, theta, sigma0=None, table=None, functional="Q"):
    """Angle bound after a change of metric and a small shift

    Returns whether Q_{chi1}(B + sigma chi3) < theta, assuming Q_{chi2}(B) < theta,
    chi1, chi2 <= 4 chi3, |chi1 - chi2| <= sigma^5 chi3 and sigma below the
    calibrated sigma0. With ``functional="P"`` the same statement is checked for P.

    Raises
    ------

    HypothesisViolated
        Naming the failing matrix inequality, or when sigma is outside the
        calibrated range.
    """
    angle = {"Q": angle_Q, "P": angle_P}[functional]
    B = np.asarray(B, dtype=np.complex128)
    n = B.shape[0]
    if sigma0 is None:
        if table is None:
            from .calibration import default_table

            table = default_table()
        sigma0 = table.sigma0(n, theta)
    if not 0.0 < sigma < sigma0:
        raise HypothesisViolated(f"sigma = {sigma:.4g} outside calibrated range (0, {sigma0:.4g})")
    failed = uniform_continuity_hypotheses(chi1, chi2, chi3, sigma)
    if failed:
        raise HypothesisViolated("violated: " + ", ".join(failed))
    before = angle(RelativePair(chi2, B), n)
    if before >= theta:
        raise HypothesisViolated(f"{functional}_chi2(B) = {before:.6g} is not below theta = {theta:.6g}")
    after = angle(RelativePair(chi1, B + sigma * np.asarray(chi3)), n)
    return after < theta


def solvability_margin(mu, rho, theta0, n=None):
    """Angle of the rescaled form near the class of a point

    Parameters
    ----------

    mu : array_like
        Positive eigenvalues.
    rho : float
        Scale in (0, 1) with rho^(n-1) < tan(theta0 / n).
    theta0 : float
    n : int, optional
        Ambient dimension, ``len(mu)`` by default.

    Returns
    -------

    float
        sum_i arccot((cot(theta0 / n) mu_i + rho) / (mu_i + rho^n)), below theta0.
    """
    mu = np.asarray(mu, dtype=float)
    n = len(mu) if n is None else n
    if np.any(mu <= 0.0):
        raise HypothesisViolated("mu must be positive")
    if not 0.0 < rho < 1.0:
        raise HypothesisViolated(f"rho = {rho} not in (0, 1)")
    if not rho ** (n - 1) < np.tan(theta0 / n) or np.tan(theta0 / n) <= 0.0:
        raise HypothesisViolated(f"rho^(n-1) = {rho ** (n - 1):.4g} not below tan(theta0/n)")
    c = 1.0 / np.tan(theta0 / n)
    value = float(np.sum(arccot((c * mu + rho) / (mu + rho**n))))
    if not value < theta0:
        raise HypothesisViolated(f"angle {value:.6g} not below theta0 = {theta0:.6g}")
    return value
