""" Regularized maximum and gluing of chart potentials
"""

from dataclasses import replace
import logging

import numpy as np
from scipy import ndimage

from ..errors import SeparationViolated

logger = logging.getLogger(__name__)


def _biweight_cdf(u):
    """Distribution function of the density 15/16 (1 - u^2)^2 on [-1, 1]"""
    u = np.clip(u, -1.0, 1.0)
    return 0.5 + 15.0 / 16.0 * (u - 2.0 * u**3 / 3.0 + u**5 / 5.0)


def smooth_max(values, eps):
    """Regularized maximum of several arrays

    Mean of max_j (t_j + eps h_j) over independent h_j with the biweight density.
    The result is symmetric, convex and nondecreasing in every input, lies in
    [max, max + eps] and equals the max where one input exceeds all others by
    2 eps. Inputs equal to -inf drop out.

    Parameters
    ----------

    values : list of array_like
        Inputs broadcast to a common shape.
    eps : float
        Positive width.

    Returns
    -------

    numpy.ndarray
    """
    values = [np.asarray(v, dtype=float) for v in values]
    if not values:
        raise ValueError("regularized maximum of no input")
    if eps <= 0.0:
        raise ValueError(f"eps = {eps} must be positive")
    if len(values) == 1:
        return values[0]
    stack = np.stack(np.broadcast_arrays(*values))
    top = np.max(stack, axis=0)
    lower, upper = top - eps, top + eps
    # the mean is lower + integral over [lower, upper] of P(max > s), a polynomial
    # of degree 5k between consecutive knots t_j +- eps, integrated exactly
    nodes, weights = np.polynomial.legendre.leggauss(5 * len(values) // 2 + 1)
    knots = np.concatenate([stack - eps, stack + eps, lower[None], upper[None]])
    knots = np.sort(np.clip(knots, lower, upper), axis=0)
    integral = np.zeros_like(top)
    for a, b in zip(knots[:-1], knots[1:]):
        half = 0.5 * (b - a)
        s = (0.5 * (a + b))[..., None] + half[..., None] * nodes
        below = np.prod(_biweight_cdf((s[None] - stack[..., None]) / eps), axis=0)
        integral += half * ((1.0 - below) @ weights)
    return lower + integral


def _boundary(mask):
    """Cells of the mask with a neighbour outside, the grid edge excluded"""
    inner = ndimage.binary_erosion(mask, border_value=1)
    return mask & ~inner


def regularized_max(potentials, eps, coordinates=None):
    """Glue potentials defined on subdomains of a common chart

    Parameters
    ----------

    potentials : list of tuple
        (mask, values) pairs, ``values`` being arrays or ChartPotential on the
        same grid and ``mask`` the boolean domain flag field.
    eps : float
    coordinates : list of numpy.ndarray, optional
        Grid coordinates used to report locations, node indices otherwise.

    Returns
    -------

    ChartPotential or numpy.ndarray
        Chart of the first ChartPotential input, or a bare array. Nodes outside
        every domain are NaN.

    Raises
    ------

    SeparationViolated
        When on the boundary of a domain, inside the union, its potential
        is not below another potential by 2 eps.
    """
    template = next((v for _, v in potentials if hasattr(v, "values")), None)
    masks = [np.asarray(mask, dtype=bool) for mask, _ in potentials]
    arrays = [np.asarray(getattr(v, "values", v), dtype=float) for _, v in potentials]
    active = [np.where(mask, a, -np.inf) for mask, a in zip(masks, arrays)]
    covered = np.any(masks, axis=0)
    # no separation is required on the boundary of the union
    outer_edge = _boundary(covered)

    for j, (mask, values) in enumerate(zip(masks, arrays)):
        edge = _boundary(mask) & ~outer_edge
        if not edge.any():
            continue
        others = [a for i, a in enumerate(active) if i != j]
        best = np.max(others, axis=0) if others else np.full(values.shape, -np.inf)
        bad = edge & ~(best >= values + 2.0 * eps)
        if bad.any():
            index = tuple(int(i) for i in np.argwhere(bad)[0])
            location = tuple(float(c[index]) for c in coordinates) if coordinates is not None else index
            raise SeparationViolated(f"potential {j} is not 2 eps below the others on its boundary", location)

    # outside its domain a potential is -inf and drops out of the maximum
    result = np.full(arrays[0].shape, np.nan)
    result[covered] = smooth_max([a[covered] for a in active], eps)
    logger.debug(f"glued {len(potentials)} potentials on {int(covered.sum())} nodes")
    if template is None:
        return result
    return replace(template, values=result, name="glued")
