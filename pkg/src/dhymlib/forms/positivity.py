""" Sign checks of (p,p)-forms built from (omega + i chi)^k
"""

from collections import namedtuple
from math import comb
import logging

import numpy as np

from ..errors import BadOrder, HypothesisViolated
from ..hermitian.angles import RelativePair, angle_P, angle_Q
from .ppform import PPForm, SimplePositiveForm, as_form, complex_power, pair_top, rotate

logger = logging.getLogger(__name__)

SGCheck = namedtuple("SGCheck", ["lhs", "rhs", "holds"])


def _pair(chi, omega):
    return RelativePair(as_form(chi).hermitian_matrix(), as_form(omega).hermitian_matrix())


def rotated_power(omega, chi, k, theta):
    """Re and Im of e^(-i theta) (omega + i chi)^k"""
    re, im = complex_power(omega, chi, k)
    return rotate(re, im, theta)


def pairings(F, chi, complementary, trials, rng):
    """pair_top(F ^ Omega, chi) over random simple positive forms Omega"""
    n = F.dim
    values = np.empty(trials)
    for t in range(trials):
        omega_form = SimplePositiveForm.random(rng, n, complementary).to_form()
        values[t] = np.real(pair_top(F.wedge(omega_form), chi))
    return values


def positivity_check(omega, chi, theta0, p, trials, seed):
    """Worst pairing of Im(e^(-i theta0) (omega + i chi)^p) with simple positive forms

    Parameters
    ----------

    omega, chi : PPForm or numpy.ndarray
        Real (1,1)-forms, chi positive, with P_n(chi, omega) < theta0.
    theta0 : float
    p : int
        Power in 1..n-1.
    trials : int
        Number of random nondegenerate simple positive (n-p, n-p)-forms.
    seed : int

    Returns
    -------

    float
        Largest pairing found, negative when the sign statement holds.
    """
    omega, chi = as_form(omega), as_form(chi)
    n = omega.dim
    if not 1 <= p <= n - 1:
        raise BadOrder(f"power p={p} outside 1..{n - 1}")
    P = angle_P(_pair(chi, omega), n)
    if P >= theta0:
        raise HypothesisViolated(f"P = {P:.6g} is not below theta0 = {theta0:.6g}")
    _, im = rotated_power(omega, chi, p, theta0)
    rng = np.random.default_rng(seed)
    return float(np.max(pairings(im, chi, n - p, trials, rng)))


def squeezed_angle_check(omega, chi2, theta, sigma, k, trials=16, seed=0, tol=1e-10):
    """Real part controlled by the imaginary part at the squeezed angle

    Checks Re(e^(-i theta') (omega + i chi2)^k) <= -(2 / sigma) Im(e^(-i theta') (omega + i chi2)^k)
    with theta' = theta + sigma, against random simple positive (n-k, n-k)-forms.
    For k = n the pairing is the scalar comparison of top coefficients.
    """
    omega, chi2 = as_form(omega), as_form(chi2)
    n = omega.dim
    if not 1 <= k <= n:
        raise BadOrder(f"power k={k} outside 1..{n}")
    Q = angle_Q(_pair(chi2, omega), n)
    if Q >= theta:
        raise HypothesisViolated(f"Q = {Q:.6g} is not below theta = {theta:.6g}")
    if not (0.0 < sigma and theta + sigma < np.pi):
        raise HypothesisViolated(f"theta + sigma = {theta + sigma:.6g} must stay below pi")
    re, im = rotated_power(omega, chi2, k, theta + sigma)
    difference = re + (2.0 / sigma) * im
    rng = np.random.default_rng(seed)
    scale = max(re.norm(), im.norm(), 1.0)
    values = pairings(difference, chi2, n - k, 1 if k == n else trials, rng)
    return bool(np.all(values <= tol * scale))


def sg_hypotheses(omega, chi2, chi3, chi_d, theta, sigma, atol=1e-12):
    """Names of violated hypotheses of the S + G domination"""
    failed = []
    if angle_Q(_pair(chi2, omega), omega.dim) >= theta:
        failed.append("Q_chi2(omega) < theta")
    if not 0.0 < sigma <= 1.0:
        failed.append("0 < sigma <= 1")
    if theta + 2.0 * sigma > np.pi:
        failed.append("theta + 2 sigma <= pi")
    c3 = chi3.hermitian_matrix()
    cd = chi_d.hermitian_matrix()
    for name, matrix in (("chi_d <= sigma^4 chi3", sigma**4 * c3 - cd), ("-sigma^4 chi3 <= chi_d", sigma**4 * c3 + cd)):
        if np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0] < -atol * max(1.0, np.abs(c3).max()):
            failed.append(name)
    return failed


def sg_terms(omega, chi2, chi3, chi_d, theta, sigma, k):
    """Scalars G, S and Im(e^(-i theta') (omega + i chi2)^(n-k)) ^ chi3^k over chi3^n"""
    n = omega.dim
    theta_p = theta + sigma
    re, im = rotated_power(omega, chi2, n - k, theta_p)
    chi3_powers = [PPForm.one(n)]
    chid_powers = [PPForm.one(n)]
    for _ in range(k):
        chi3_powers.append(chi3_powers[-1].wedge(chi3))
        chid_powers.append(chid_powers[-1].wedge(chi_d))
    base = np.real(pair_top(im.wedge(chi3_powers[k]), chi3))
    G = sigma**k * base
    S = 0.0
    for l in range(k):
        j = k - l
        mixed = chi3_powers[l].wedge(chid_powers[j])
        # Im(e (i chi_d)^j) with (i)^j real for even j, imaginary for odd j
        if j % 2 == 0:
            term = (-1) ** (j // 2) * im.wedge(mixed)
        else:
            term = (-1) ** ((j - 1) // 2) * re.wedge(mixed)
        S += comb(k, l) * sigma**l * np.real(pair_top(term, chi3))
    return G, S, base


def terms_SG_check(omega, chi2, chi3, chi_d, theta, sigma, k, C_n=None, table=None, tol=1e-10):
    """S + G <= sigma^k (1 - C_n sigma^2) Im(e^(-i theta') (omega + i chi2)^(n-k)) ^ chi3^k

    Top-degree pairings are taken against chi3^n. ``C_n`` comes from the
    calibration table when omitted.

    Returns
    -------

    SGCheck
        (lhs, rhs, holds)
    """
    omega, chi2, chi3, chi_d = (as_form(x) for x in (omega, chi2, chi3, chi_d))
    n = omega.dim
    if not 1 <= k <= n:
        raise BadOrder(f"power k={k} outside 1..{n}")
    failed = sg_hypotheses(omega, chi2, chi3, chi_d, theta, sigma)
    if failed:
        raise HypothesisViolated("violated: " + ", ".join(failed))
    if C_n is None:
        if table is None:
            from ..hermitian.calibration import default_table

            table = default_table()
        C_n = table.C_n(n)
    G, S, base = sg_terms(omega, chi2, chi3, chi_d, theta, sigma, k)
    lhs = G + S
    rhs = sigma**k * (1.0 - C_n * sigma**2) * base
    return SGCheck(lhs, rhs, lhs <= rhs + tol * abs(base))


def random_sg_case(rng, n, theta, sigma):
    """Random (omega, chi2, chi3, chi_d) satisfying the S + G hypotheses"""
    from ..hermitian.sampling import random_pair_in_gamma, random_hermitian, random_positive

    chi3 = random_positive(rng, n, 0.5, 2.0)
    values, vectors = np.linalg.eigh(chi3)
    sqrt3 = (vectors * np.sqrt(values)) @ vectors.conj().T
    e = random_hermitian(rng, n)
    e /= np.abs(np.linalg.eigvalsh(e)).max()
    chi_d = sigma**4 * rng.uniform(0.0, 1.0) * sqrt3 @ e @ sqrt3
    pair = random_pair_in_gamma(rng, n, theta)
    return (
        PPForm.from_hermitian(pair.form),
        PPForm.from_hermitian(pair.metric),
        PPForm.from_hermitian(chi3),
        PPForm.from_hermitian(0.5 * (chi_d + chi_d.conj().T)),
    )


def sweep_C_n(n, rng, samples=100, sigma_max=0.3):
    """Largest (1 - (G + S) / (sigma^k I)) / sigma^2 seen on random cases"""
    worst = 0.0
    for _ in range(samples):
        theta = rng.uniform(0.2, np.pi - 2.0 * sigma_max - 0.05)
        sigma = rng.uniform(0.01, sigma_max)
        k = int(rng.integers(1, n + 1))
        omega, chi2, chi3, chi_d = random_sg_case(rng, n, theta, sigma)
        G, S, base = sg_terms(omega, chi2, chi3, chi_d, theta, sigma, k)
        worst = max(worst, (1.0 - (G + S) / (sigma**k * base)) / sigma**2)
    return worst
