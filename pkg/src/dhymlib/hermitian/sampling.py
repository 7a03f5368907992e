""" Random Hermitian matrices for seeded sweeps
"""

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from .angles import RelativePair


def random_unitary(rng, n):
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random((1, 1)))


def random_hermitian(rng, n, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + z.conj().T)


def hermitian_with_spectrum(rng, eigenvalues):
    u = random_unitary(rng, len(eigenvalues))
    return (u * np.asarray(eigenvalues, dtype=float)) @ u.conj().T


def random_positive(rng, n, low=0.2, high=4.0):
    """Positive definite matrix with spectrum uniform in [low, high]"""
    return hermitian_with_spectrum(rng, rng.uniform(low, high, n))


def random_psd(rng, n, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (z @ z.conj().T) / n


def random_pair(rng, n, spread=3.0):
    """Pair with a random metric and a random form"""
    return RelativePair(random_positive(rng, n), random_hermitian(rng, n, spread / np.sqrt(n)))


def pair_from_angles(rng, metric, angles):
    """Pair whose relative eigenvalues are cot(angles)"""
    sqrt_metric = linalg.sqrtm(metric)
    sqrt_metric = 0.5 * (sqrt_metric + sqrt_metric.conj().T)
    reduced = hermitian_with_spectrum(rng, 1.0 / np.tan(np.asarray(angles, dtype=float)))
    return RelativePair(metric, sqrt_metric @ reduced @ sqrt_metric)


def random_angles(rng, n, total):
    """n positive angles summing to ``total``"""
    weights = rng.dirichlet(np.ones(n))
    return total * weights


def random_pair_in_gamma(rng, n, q_max, metric=None):
    """Random pair with Q_n in (0, q_max)"""
    if metric is None:
        metric = random_positive(rng, n)
    total = q_max * rng.uniform(0.05, 0.999)
    return pair_from_angles(rng, metric, random_angles(rng, n, total))
