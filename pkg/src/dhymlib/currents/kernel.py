""" Radial mollifier kernels
"""

from dataclasses import dataclass
from functools import cached_property
import logging
from math import factorial

import numpy as np
from scipy import integrate

logger = logging.getLogger(__name__)


def sphere_area(m):
    """Area of the unit sphere of R^{2m}, 2 pi^m / (m - 1)!"""
    return 2.0 * np.pi**m / factorial(m - 1)


def _flat_exp(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)


def smooth_step(x):
    """C-infinity step, 0 for x <= 0 and 1 for x >= 1"""
    a = _flat_exp(x)
    b = _flat_exp(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def bump(u):
    """exp(-1 / (1 - u^2)) on (-1, 1), 0 elsewhere"""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - u**2, 1.0)), 0.0)


@dataclass(frozen=True)
class MollifierKernel:
    """Radial profile rho on [0, 1] of unit mass on the unit ball of C^m

    The profile is constant on [0, 1/2] and decays smoothly to 0 at 1. An
    optional shell bump supported in (1 - shell_width, 1) moves mass towards
    the boundary, ``shell_weight`` is its weight relative to the plateau.

    Parameters
    ----------

    m : int
        Complex dimension, the ball lives in R^{2m}.
    shell_weight : float
    shell_width : float
        In (0, 1/2].
    """

    m: int = 1
    shell_weight: float = 0.0
    shell_width: float = 0.25

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"kernel dimension m={self.m} must be >= 1")
        if self.shell_weight < 0.0 or not 0.0 < self.shell_width <= 0.5:
            raise ValueError("shell_weight must be >= 0 and shell_width in (0, 1/2]")

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        plateau = 1.0 - smooth_step(2.0 * t - 1.0)
        shell = bump((2.0 * t - (2.0 - self.shell_width)) / self.shell_width)
        return np.where(t < 1.0, plateau + self.shell_weight * shell, 0.0)

    def _radial_integral(self, func):
        breaks = [0.5, 1.0 - self.shell_width]
        value, _ = integrate.quad(func, 0.0, 1.0, points=breaks, limit=400, epsabs=1e-14, epsrel=1e-13)
        return value

    @cached_property
    def normalization(self):
        """Constant c with c * integral of raw profile over the unit ball = 1"""
        d = 2 * self.m
        return 1.0 / (sphere_area(self.m) * self._radial_integral(lambda t: self._raw(t) * t ** (d - 1)))

    def profile(self, t):
        """rho(t), vectorized"""
        return self.normalization * self._raw(t)

    def radial_moment(self, func):
        """Area of the unit sphere times the integral of func(t) rho(t) t^{2m-1} on [0, 1]"""
        d = 2 * self.m
        return sphere_area(self.m) * self._radial_integral(lambda t: func(t) * self.profile(t) * t ** (d - 1))

    @property
    def mass(self):
        return self.radial_moment(lambda t: 1.0)

    @property
    def second_moment(self):
        """Integral of rho(|y|) |y|^2 over the unit ball"""
        return self.radial_moment(lambda t: t**2)

    def stencil_weights(self, distances, r):
        """Normalized weights of stencil points at the given distances"""
        weights = self.profile(np.asarray(distances, dtype=float) / r)
        return weights / weights.sum()


def eta_constant(m, kernel=None, points=None):
    """Constant of the comparison between sup and mollified potentials

    3^{2m-1} / 2^{2m-3} log 2 plus the sphere area times the integral of
    log(1 / t) t^{2m-1} rho(t) on [0, 1].

    Parameters
    ----------

    m : int
    kernel : MollifierKernel, optional
        Default kernel of dimension ``m``.
    points : int, optional
        When given the radial integral uses Simpson's rule on this many
        nodes instead of adaptive quadrature.
    """
    kernel = MollifierKernel(m) if kernel is None else kernel
    if kernel.m != m:
        raise ValueError(f"kernel of dimension {kernel.m} used with m={m}")
    head = 3.0 ** (2 * m - 1) / 2.0 ** (2 * m - 3) * np.log(2.0)
    if points is None:
        with np.errstate(divide="ignore"):
            tail = kernel.radial_moment(lambda t: -np.log(t) if t > 0.0 else 0.0)
        return float(head + tail)
    t = np.linspace(0.0, 1.0, points)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(t > 0.0, -np.log(np.where(t > 0.0, t, 1.0)) * t ** (2 * m - 1), 0.0) * kernel.profile(t)
    return float(head + sphere_area(m) * integrate.simpson(integrand, x=t))
