""" Twisted dHYM operator on flat complex tori

Grids are periodic with period 2 pi along every real axis. Axes are ordered
(x1, y1, x2, y2, ...) with z_j = x_j + i y_j, and complex derivatives are
spectral: d/dz = (d/dx - i d/dy) / 2.
"""

from collections import namedtuple
from dataclasses import dataclass, field
import logging

import numpy as np

from ..errors import HypothesisViolated, MetricNotPositive
from ..hermitian.angles import arccot, inverse_sqrt

logger = logging.getLogger(__name__)

MAX_AXIS = {1: 1024, 2: 16}

Residual = namedtuple("Residual", ["values", "outside"])
ConeMargins = namedtuple("ConeMargins", ["P", "Q"])


def coordinates(grid):
    """Meshgrid of the real coordinates, one array per axis"""
    axes = [2.0 * np.pi * np.arange(N) / N for N in grid]
    return np.meshgrid(*axes, indexing="ij")


def cell_volume(grid):
    return float(np.prod([2.0 * np.pi / N for N in grid]))


def wavenumbers(grid):
    """Integer wavenumbers per axis with the Nyquist mode set to 0"""
    ks = []
    for N in grid:
        k = np.fft.fftfreq(N, d=1.0 / N)
        if N % 2 == 0:
            k[N // 2] = 0.0
        ks.append(k)
    return np.meshgrid(*ks, indexing="ij")


def complex_symbols(grid):
    """Fourier symbols of d/dz_j and d/dzbar_j"""
    K = wavenumbers(grid)
    m = len(grid) // 2
    dz = [0.5 * (1j * K[2 * j] + K[2 * j + 1]) for j in range(m)]
    dzbar = [0.5 * (1j * K[2 * j] - K[2 * j + 1]) for j in range(m)]
    return dz, dzbar


def complex_hessian(values, grid):
    """Spectral complex Hessian d^2 phi / dz_j dzbar_k, shape grid + (m, m)"""
    m = len(grid) // 2
    dz, dzbar = complex_symbols(grid)
    spectrum = np.fft.fftn(values)
    hessian = np.empty(tuple(grid) + (m, m), dtype=np.complex128)
    for j in range(m):
        for k in range(m):
            hessian[..., j, k] = np.fft.ifftn(dz[j] * dzbar[k] * spectrum)
    return 0.5 * (hessian + np.conj(np.swapaxes(hessian, -1, -2)))


@dataclass
class PotentialGrid:
    """Real potential phi sampled on a periodic grid"""

    values: np.ndarray
    gauged: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.gauged:
            self.values = self.values - self.values.mean()

    @property
    def grid(self):
        return self.values.shape

    @classmethod
    def zeros(cls, grid):
        return cls(np.zeros(tuple(grid)))

    @classmethod
    def from_function(cls, grid, func, gauged=True):
        """Sample ``func(*coordinates)``"""
        return cls(func(*coordinates(grid)), gauged=gauged)

    def __add__(self, other):
        other = other.values if isinstance(other, PotentialGrid) else other
        return PotentialGrid(self.values + other, self.gauged)

    def sup_distance(self, other):
        other = other.values if isinstance(other, PotentialGrid) else other
        return float(np.max(np.abs(self.values - other)))


def _hermitian_field(matrix, grid, m, name):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape == (m, m):
        matrix = np.broadcast_to(matrix, tuple(grid) + (m, m))
    if matrix.shape != tuple(grid) + (m, m):
        raise HypothesisViolated(f"{name} has shape {matrix.shape}, expected {(m, m)} or {tuple(grid) + (m, m)}")
    if np.max(np.abs(matrix - np.conj(np.swapaxes(matrix, -1, -2)))) > 1e-12 * max(1.0, np.abs(matrix).max()):
        raise HypothesisViolated(f"{name} is not Hermitian")
    return matrix


@dataclass
class TorusProblem:
    """Twisted dHYM equation Re(w + i chi)^m - cot(theta0) Im(w + i chi)^m = f chi^m

    Parameters
    ----------

    m : int
        Complex dimension, 1 or 2.
    grid : tuple of int
        Sample counts along the 2m real axes (x1, y1, x2, y2).
    omega0 : numpy.ndarray
        Background form, constant (m, m) or per grid point ``grid + (m, m)``.
    chi : numpy.ndarray
        Constant positive (m, m) Hermitian metric.
    theta0 : float
        Phase in (0, pi).
    Theta0 : float
        Bound of the Q functional in (theta0, pi).
    f : numpy.ndarray
        Twist, a real field on the grid.
    twist_floor : float
        Constant c of the lower bound f > -c required for m >= 4.
    name : str
    exact : PotentialGrid, optional
        Known solution of manufactured problems.
    """

    m: int
    grid: tuple
    omega0: np.ndarray = field(repr=False)
    chi: np.ndarray = field(repr=False)
    theta0: float
    Theta0: float
    f: np.ndarray = field(repr=False)
    twist_floor: float = 0.0
    name: str = "problem"
    exact: PotentialGrid = field(default=None, repr=False)

    def __post_init__(self):
        self.grid = tuple(int(N) for N in self.grid)
        if self.m not in MAX_AXIS:
            raise HypothesisViolated(f"complex dimension m={self.m} not supported, use 1 or 2")
        if len(self.grid) != 2 * self.m:
            raise HypothesisViolated(f"grid {self.grid} must have {2 * self.m} axes")
        if min(self.grid) < 4 or max(self.grid) > MAX_AXIS[self.m]:
            raise HypothesisViolated(f"grid sizes must lie in 4..{MAX_AXIS[self.m]} for m={self.m}")
        if not 0.0 < self.theta0 < self.Theta0 < np.pi:
            raise HypothesisViolated(f"need 0 < theta0 < Theta0 < pi, got {self.theta0}, {self.Theta0}")
        self.chi = np.asarray(self.chi, dtype=np.complex128).reshape(self.m, self.m)
        self.chi = 0.5 * (self.chi + self.chi.conj().T)
        if np.linalg.eigvalsh(self.chi)[0] <= 0.0:
            raise MetricNotPositive("chi is not positive definite")
        self.omega0 = _hermitian_field(self.omega0, self.grid, self.m, "omega0")
        self.f = np.broadcast_to(np.asarray(self.f, dtype=float), self.grid)

    @property
    def cot0(self):
        return np.cos(self.theta0) / np.sin(self.theta0)

    @property
    def cell_volume(self):
        return cell_volume(self.grid)

    @property
    def volume(self):
        return (2.0 * np.pi) ** (2 * self.m)

    def with_twist(self, f, name=None):
        return TorusProblem(
            self.m, self.grid, self.omega0, self.chi, self.theta0, self.Theta0, f, self.twist_floor, name or self.name
        )

    def twist_violations(self):
        """Sign constraint of the twist: f >= 0 for m <= 3, f > -c otherwise"""
        if self.m <= 3:
            low = float(self.f.min())
            return [] if low >= 0.0 else [f"f >= 0 fails, min f = {low:.6g}"]
        low = float(self.f.min())
        return [] if low > -self.twist_floor else [f"f > -{self.twist_floor} fails, min f = {low:.6g}"]

    def check_twist(self, rtol=1e-8):
        """Raise HypothesisViolated when the twist is not admissible

        The twist must satisfy its sign constraint and the compatibility
        condition with the background form.
        """
        found = self.twist_violations()
        gap = compatibility_gap(PotentialGrid.zeros(self.grid), self)
        scale = self.volume * max(1.0, float(np.abs(self.f).max()))
        if abs(gap) > rtol * scale:
            found.append(f"compatibility gap {gap:.3e}")
        if found:
            raise HypothesisViolated(f"twist of <{self.name}> not admissible: " + "; ".join(found))


def hessian_form(phi, prob):
    """Form field omega0 + i ddbar phi as Hermitian matrices, shape grid + (m, m)"""
    if phi.grid != prob.grid:
        raise HypothesisViolated(f"potential grid {phi.grid} differs from problem grid {prob.grid}")
    return prob.omega0 + complex_hessian(phi.values, prob.grid)


def relative_eigenvalues(omega, chi):
    """Ascending eigenvalues of chi^{-1} omega at every grid point"""
    s = inverse_sqrt(chi)
    reduced = s @ omega @ s
    return np.linalg.eigvalsh(0.5 * (reduced + np.conj(np.swapaxes(reduced, -1, -2))))


def density(eigenvalues, theta0):
    """Re - cot(theta0) Im of prod(lambda_j + i)

    Equal to prod sqrt(1 + lambda_j^2) sin(theta0 - sum arccot(lambda_j)) / sin(theta0).
    """
    product = np.prod(eigenvalues + 1j, axis=-1)
    return product.real - np.cos(theta0) / np.sin(theta0) * product.imag


def angle_density(eigenvalues, theta0, f=0.0):
    """Concave form cot(sum arccot(lambda_j)) - cot(theta0) - f / Im prod(lambda_j + i)

    Equal to ``(density - f) / Im prod(lambda_j + i)``; the imaginary part is
    positive on the cone Q < pi, so both vanish together.
    """
    product = np.prod(eigenvalues + 1j, axis=-1)
    return (product.real - f) / product.imag - np.cos(theta0) / np.sin(theta0)


def angle_density_gradient(eigenvalues, theta0, f=0.0, cluster=1e-8):
    """Derivatives of ``angle_density`` with respect to every eigenvalue

    Entries of eigenvalues closer than ``cluster`` share their mean derivative.
    """
    shifted = eigenvalues + 1j
    product = np.prod(shifted, axis=-1)[..., None]
    quotient = product / shifted
    f = np.asarray(f, dtype=float)[..., None]
    # d cot(Q) / d lambda_j = 1 / ((1 + lambda_j^2) sin^2 Q)
    gradient = (np.abs(product) ** 2 / (1.0 + eigenvalues**2) + f * quotient.imag) / product.imag**2
    if eigenvalues.shape[-1] == 2:
        close = np.abs(eigenvalues[..., 1] - eigenvalues[..., 0]) < cluster * np.maximum(1.0, np.abs(eigenvalues).max(axis=-1))
        mean = gradient.mean(axis=-1)
        gradient[close] = mean[close][:, None]
    return gradient


def cone_margins(eigenvalues, theta0, Theta0):
    """Pointwise theta0 - P and Theta0 - Q of the relative eigenvalues"""
    angles = arccot(eigenvalues)
    Q = angles.sum(axis=-1)
    # ascending eigenvalues have descending arccot, P drops the smallest angle
    P = Q - angles[..., -1]
    return ConeMargins(theta0 - P, Theta0 - Q)


def residual(phi, prob, margin=0.0):
    """Residual density - f with the mask of grid points outside the cone

    The cone is P < theta0 + margin and Q < Theta0.
    """
    eigenvalues = relative_eigenvalues(hessian_form(phi, prob), prob.chi)
    margins = cone_margins(eigenvalues, prob.theta0 + margin, prob.Theta0)
    outside = (margins.P <= 0.0) | (margins.Q <= 0.0)
    if outside.any():
        logger.debug(f"residual evaluated with {int(outside.sum())} points outside the cone")
    return Residual(density(eigenvalues, prob.theta0) - prob.f, outside)


def compatibility_gap(phi, prob):
    """Integral of f chi^m minus the integral of the density, in units of chi^m"""
    eigenvalues = relative_eigenvalues(hessian_form(phi, prob), prob.chi)
    return float(prob.cell_volume * np.sum(prob.f - density(eigenvalues, prob.theta0)))


def manufactured_twist(prob, exact):
    """Twist for which ``exact`` solves the equation"""
    eigenvalues = relative_eigenvalues(hessian_form(exact, prob), prob.chi)
    return density(eigenvalues, prob.theta0)


def trigonometric_potential(grid, modes, scale=1.0):
    """Sum of amplitude * cos or sin(k . x) over modes

    Parameters
    ----------

    grid : tuple of int
    modes : list of dict
        Items with ``amplitude``, integer ``wavevector`` of length 2m and
        ``phase`` in {"cos", "sin"}.
    scale : float
        Global factor applied to every amplitude.
    """
    X = coordinates(grid)
    values = np.zeros(tuple(grid))
    for mode in modes:
        k = np.asarray(mode["wavevector"], dtype=float)
        if k.shape != (len(grid),):
            raise HypothesisViolated(f"wavevector {mode['wavevector']} must have {len(grid)} entries")
        phase = sum(kj * xj for kj, xj in zip(k, X))
        wave = {"cos": np.cos, "sin": np.sin}[mode.get("phase", "cos")]
        values += scale * float(mode["amplitude"]) * wave(phase)
    return PotentialGrid(values)
