""" Chart utility tools
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)

try:
    from numba import njit

    has_numba = True
except ImportError:
    has_numba = False
    logger.warning("Failed to find numba, stencil loops will not be accelerated")


def njit_wrapper(function):
    if has_numba:
        return njit()(function)
    else:
        return function


@njit_wrapper
def masked_weighted_mean(values, targets, deltas, weights, floor):
    """Weighted mean of the stencil values above ``floor`` around every target

    Parameters
    ----------

    values : numpy.ndarray
        Flattened chart samples.
    targets : numpy.ndarray
        Flat indices of the output points.
    deltas : numpy.ndarray
        Flat offsets of the stencil.
    weights : numpy.ndarray
        Kernel weight of every offset.
    floor : float
        Samples at or below the floor are excluded and the weights renormalized.

    Returns
    -------

    numpy.ndarray
        One value per target, ``floor`` when the whole stencil is excluded.
    """
    acc = np.zeros(targets.size)
    mass = np.zeros(targets.size)
    for j in range(deltas.size):
        v = values[targets + deltas[j]]
        keep = v > floor
        acc += np.where(keep, weights[j] * v, 0.0)
        mass += np.where(keep, weights[j], 0.0)
    safe = np.where(mass > 0.0, mass, 1.0)
    return np.where(mass > 0.0, acc / safe, floor)


@njit_wrapper
def stencil_max(values, targets, deltas):
    """Largest stencil value around every target"""
    out = np.full(targets.size, -np.inf)
    for j in range(deltas.size):
        out = np.maximum(out, values[targets + deltas[j]])
    return out
