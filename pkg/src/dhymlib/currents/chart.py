""" Potentials sampled on Euclidean coordinate charts

A chart of radius R is a uniform grid of C^m = R^{2m} centered at the origin,
covering the ball B_{4R}. Axes are ordered (x1, y1, x2, y2). Values below the
pole floor stand for -infinity: sups ignore them and mollification drops them
and renormalizes the kernel mass.
"""

from collections import namedtuple
from dataclasses import dataclass, field, replace
import logging

import numpy as np

from ..datafiles import locate, packaged, read_yaml, strip_lines
from ..errors import HypothesisViolated, ParseError, ResolutionError
from ..hermitian.angles import RelativePair, angle_Q, inverse_sqrt, q_from_eigenvalues
from .kernel import MollifierKernel, eta_constant
from .utility import masked_weighted_mean, stencil_max

logger = logging.getLogger(__name__)

POLE_FLOOR = -1e12
CHART_DIR = "data/charts"
CHART_KINDS = ("log_pole", "quadratic", "smooth", "mixture")

Comparison = namedtuple("Comparison", ["gap_half", "gap_moll", "nu", "eta", "half_ok", "moll_ok"])
MatrixJensen = namedtuple("MatrixJensen", ["lhs", "rhs", "holds"])


def _as_real_point(point, m):
    point = np.atleast_1d(np.asarray(point))
    if np.iscomplexobj(point):
        point = np.column_stack([point.real, point.imag]).ravel()
    point = point.astype(float)
    if point.shape != (2 * m,):
        raise HypothesisViolated(f"point {point} must have {m} complex or {2 * m} real coordinates")
    return point


@dataclass
class ChartPotential:
    """Samples of a potential on a chart grid

    Parameters
    ----------

    values : numpy.ndarray
        Samples of shape (N,) * 2m with N odd, the origin is the middle node.
    spacing : float
        Grid step h.
    radius : float
        Chart radius R, the grid must reach 4R.
    psh : bool
        Plurisubharmonic declaration; comparison contracts are only asserted
        for declared potentials.
    poles : tuple
        Real coordinates of known poles.
    domain : float, optional
        Radius of the ball where values are defined, 4R for sampled charts.
    """

    values: np.ndarray = field(repr=False)
    spacing: float
    radius: float
    psh: bool = False
    poles: tuple = ()
    domain: float = None
    name: str = "chart"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        N = values.shape[0]
        if values.ndim % 2 or any(n != N for n in values.shape) or N % 2 == 0:
            raise ResolutionError(f"chart samples of shape {values.shape} must be (N,) * 2m with N odd")
        if self.domain is None:
            self.domain = 4.0 * self.radius
        if (N - 1) / 2 * self.spacing < 4.0 * self.radius * (1.0 - 1e-12):
            raise ResolutionError(f"grid of {N} points with step {self.spacing} does not cover B_4R, R={self.radius}")
        with np.errstate(invalid="ignore"):
            self.values = np.where(values < POLE_FLOOR, POLE_FLOOR, values)

    @property
    def m(self):
        return self.values.ndim // 2

    @property
    def size(self):
        return self.values.shape[0]

    def axis(self):
        c = (self.size - 1) // 2
        return self.spacing * (np.arange(self.size) - c)

    def coordinates(self):
        return np.meshgrid(*([self.axis()] * (2 * self.m)), indexing="ij")

    def distances(self, center=None):
        X = self.coordinates()
        center = np.zeros(2 * self.m) if center is None else center
        return np.sqrt(sum((x - c) ** 2 for x, c in zip(X, center)))

    @classmethod
    def from_function(cls, func, m=1, radius=1.0, spacing=1.0 / 64, psh=False, poles=(), name="chart"):
        """Sample ``func(z_1, ..., z_m)`` at complex grid coordinates"""
        half = int(np.ceil(4.0 * radius / spacing - 1e-9))
        axis = spacing * np.arange(-half, half + 1)
        X = np.meshgrid(*([axis] * (2 * m)), indexing="ij")
        Z = [X[2 * j] + 1j * X[2 * j + 1] for j in range(m)]
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(func(*Z), dtype=float)
        values = np.where(np.isnan(values) | (values == -np.inf), POLE_FLOOR, values)
        return cls(values, spacing, radius, psh, tuple(poles), name=name)

    def index_of(self, point):
        """Flat index of the grid node at ``point``"""
        point = _as_real_point(point, self.m)
        position = point / self.spacing + (self.size - 1) // 2
        nearest = np.rint(position)
        if np.abs(position - nearest).max() > 1e-6 or nearest.min() < 0 or nearest.max() >= self.size:
            raise HypothesisViolated(f"point {point} is not a node of the chart grid")
        return int(np.ravel_multi_index(tuple(nearest.astype(int)), self.values.shape))

    def value_at(self, point):
        return float(self.values.ravel()[self.index_of(point)])


def _check_radius(T, r, mollifier):
    if not 0.0 < r < T.radius:
        raise ResolutionError(f"radius r={r} must lie in (0, R={T.radius})")
    if mollifier and T.spacing > r / 8.0 * (1.0 + 1e-12):
        raise ResolutionError(f"grid step {T.spacing} exceeds r/8 = {r / 8.0} for mollification")
    if not mollifier and r < T.spacing * (1.0 - 1e-12):
        raise ResolutionError(f"radius r={r} is below the grid step {T.spacing}")


def _stencil(T, r):
    """Flat offsets and distances of the grid nodes in the closed ball of radius r"""
    k = int(np.floor(r / T.spacing + 1e-9))
    axis = np.arange(-k, k + 1)
    offsets = np.stack(np.meshgrid(*([axis] * (2 * T.m)), indexing="ij"), axis=-1).reshape(-1, 2 * T.m)
    distances = T.spacing * np.sqrt((offsets**2).sum(axis=1))
    keep = distances <= r * (1.0 + 1e-12)
    strides = np.array([T.size ** (2 * T.m - 1 - a) for a in range(2 * T.m)])
    return offsets[keep] @ strides, distances[keep]


def _targets(T, points, r):
    """Flat indices of query nodes whose r-ball stays inside the domain"""
    if points is None:
        inside = T.distances() <= min(3.0 * T.radius, T.domain - r) * (1.0 + 1e-12)
        return np.flatnonzero(inside.ravel())
    targets = np.array([T.index_of(p) for p in points], dtype=np.int64)
    norms = np.array([np.linalg.norm(_as_real_point(p, T.m)) for p in points])
    if np.any(norms + r > T.domain * (1.0 + 1e-12)):
        raise ResolutionError(f"ball of radius {r} leaves the chart domain of radius {T.domain}")
    return targets


def _derived(T, targets, values, r, name):
    out = np.full(T.values.size, np.nan)
    out[targets] = values
    return replace(
        T, values=out.reshape(T.values.shape), domain=min(3.0 * T.radius, T.domain - r), name=name
    )


def mollify_at(T, r, points, kernel=None):
    """Mollified values T^(r) at the given grid nodes"""
    _check_radius(T, r, mollifier=True)
    kernel = MollifierKernel(T.m) if kernel is None else kernel
    deltas, distances = _stencil(T, r)
    weights = kernel.stencil_weights(distances, r)
    targets = _targets(T, points, r)
    return masked_weighted_mean(T.values.ravel(), targets, deltas, weights, POLE_FLOOR)


def mollify(T, r, kernel=None):
    """Convolution with the kernel scaled to radius r, defined on B_3R

    Raises
    ------

    ResolutionError
        When r is not in (0, R) or the grid step exceeds r/8.
    """
    _check_radius(T, r, mollifier=True)
    kernel = MollifierKernel(T.m) if kernel is None else kernel
    deltas, distances = _stencil(T, r)
    weights = kernel.stencil_weights(distances, r)
    targets = _targets(T, None, r)
    logger.debug(f"mollify <{T.name}>: {targets.size} points, stencil of {deltas.size}")
    values = masked_weighted_mean(T.values.ravel(), targets, deltas, weights, POLE_FLOOR)
    return _derived(T, targets, values, r, f"{T.name}^({r:g})")


def sup_at(T, r, points):
    """Sup of T over the grid nodes of the closed r-balls around ``points``"""
    _check_radius(T, r, mollifier=False)
    deltas, _ = _stencil(T, r)
    return stencil_max(T.values.ravel(), _targets(T, points, r), deltas)


def sup_convolution(T, r):
    """Sup of T over grid nodes at distance at most r, defined on B_3R"""
    _check_radius(T, r, mollifier=False)
    deltas, _ = _stencil(T, r)
    targets = _targets(T, None, r)
    return _derived(T, targets, stencil_max(T.values.ravel(), targets, deltas), r, f"{T.name}_{r:g}")


def lelong_proxy(T, z, r):
    """Slope (psi_{3R/4}(z) - psi_r(z)) / (log(3R/4) - log(r)) of the sup

    Parameters
    ----------

    T : ChartPotential
    z : array_like
        Grid node, m complex or 2m real coordinates.
    r : float
        In (0, R/2).
    """
    if not 0.0 < r < 0.5 * T.radius:
        raise ResolutionError(f"radius r={r} must lie in (0, R/2 = {0.5 * T.radius})")
    outer = 0.75 * T.radius
    sups = [float(sup_at(T, rho, [z])[0]) for rho in (outer, r)]
    return (sups[0] - sups[1]) / (np.log(outer) - np.log(r))


def comparison_check(T, z, r, kernel=None, eta=None, tol=1e-9):
    """Gaps between sups and mollification at z

    Returns ``psi_r - psi_{r/2}``, ``psi_r - psi^(r)`` and the Lelong proxy at
    (z, r). For plurisubharmonic declared charts the flags tell whether
    0 <= gap_half <= log(2) nu and 0 <= gap_moll <= eta nu hold within ``tol``,
    otherwise they are None.
    """
    if not 0.0 < r < 0.5 * T.radius:
        raise ResolutionError(f"radius r={r} must lie in (0, R/2 = {0.5 * T.radius})")
    kernel = MollifierKernel(T.m) if kernel is None else kernel
    eta = eta_constant(T.m, kernel) if eta is None else eta
    sup_r = float(sup_at(T, r, [z])[0])
    gap_half = sup_r - float(sup_at(T, 0.5 * r, [z])[0])
    gap_moll = sup_r - float(mollify_at(T, r, [z], kernel)[0])
    nu = lelong_proxy(T, z, r)
    if not T.psh:
        return Comparison(gap_half, gap_moll, nu, eta, None, None)
    half_ok = -tol <= gap_half <= np.log(2.0) * nu + tol
    moll_ok = -tol <= gap_moll <= eta * nu + tol
    return Comparison(gap_half, gap_moll, nu, eta, bool(half_ok), bool(moll_ok))


def complex_hessian(T):
    """Central difference complex Hessian d^2 / dz_j dzbar_k, shape values + (m, m)

    Boundary nodes and nodes next to undefined values are NaN.
    """
    h = T.spacing
    v = T.values
    m = T.m

    def second(a, b):
        if a == b:
            return (np.roll(v, -1, a) - 2.0 * v + np.roll(v, 1, a)) / h**2
        shifted = lambda s, t: np.roll(np.roll(v, -s, a), -t, b)
        return (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h**2)

    hessian = np.empty(v.shape + (m, m), dtype=np.complex128)
    for j in range(m):
        for k in range(m):
            xj, yj, xk, yk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
            real = second(xj, xk) + second(yj, yk)
            imag = second(xj, yk) - second(yj, xk)
            hessian[..., j, k] = 0.25 * (real + 1j * imag)
    edge = np.zeros(v.shape, dtype=bool)
    for a in range(v.ndim):
        index = [slice(None)] * v.ndim
        for i in (0, -1):
            index[a] = i
            edge[tuple(index)] = True
    hessian[edge] = np.nan
    return hessian


def hessian_angles(T, metric=None):
    """Q functional of the complex Hessian at every interior defined node"""
    hessian = complex_hessian(T)
    s = inverse_sqrt(np.eye(T.m) if metric is None else np.asarray(metric, dtype=np.complex128))
    flat = hessian.reshape(-1, T.m, T.m)
    defined = np.isfinite(flat).all(axis=(1, 2))
    reduced = s @ flat[defined] @ s
    eigenvalues = np.linalg.eigvalsh(0.5 * (reduced + np.conj(np.swapaxes(reduced, -1, -2))))
    out = np.full(flat.shape[0], np.nan)
    out[defined] = q_from_eigenvalues(eigenvalues, T.m)
    return out.reshape(T.values.shape)


def matrix_jensen_check(matrices, T, metric, theta_tilde0, r, points, kernel=None, rtol=1e-8):
    """Jensen inequality for mollified matrix fields

    Compares 1 / (cot Q(mollified field) - cot theta_tilde0) with the mollified
    values of 1 / (cot Q - cot theta_tilde0) at the given nodes.

    Parameters
    ----------

    matrices : numpy.ndarray
        Hermitian field of shape T.values.shape + (n, n) with Q below
        ``theta_tilde0``.
    T : ChartPotential
        Chart providing the grid geometry.
    metric : numpy.ndarray
    theta_tilde0 : float
    r : float
    points : list
    """
    _check_radius(T, r, mollifier=True)
    kernel = MollifierKernel(T.m) if kernel is None else kernel
    deltas, distances = _stencil(T, r)
    weights = kernel.stencil_weights(distances, r)
    targets = _targets(T, points, r)
    n = np.asarray(metric).shape[0]
    flat = np.asarray(matrices, dtype=np.complex128).reshape(-1, n, n)
    cot_tilde = 1.0 / np.tan(theta_tilde0)

    def transform(matrix):
        q = angle_Q(RelativePair(metric, matrix), n)
        if not q < theta_tilde0:
            raise HypothesisViolated(f"field has Q = {q:.6g} not below {theta_tilde0:.6g}")
        return 1.0 / (1.0 / np.tan(q) - cot_tilde)

    lhs, rhs = [], []
    for target in targets:
        stencil = flat[target + deltas]
        average = np.einsum("s,sij->ij", weights, stencil)
        lhs.append(transform(0.5 * (average + average.conj().T)))
        rhs.append(float(np.dot(weights, [transform(s) for s in stencil])))
    lhs, rhs = np.array(lhs), np.array(rhs)
    return MatrixJensen(lhs, rhs, bool(np.all(lhs <= rhs + rtol * np.maximum(1.0, np.abs(rhs)))))


def _complex_center(center, m):
    if center is None:
        return np.zeros(m, dtype=np.complex128)
    center = np.asarray(center, dtype=float).reshape(m, 2)
    return center[:, 0] + 1j * center[:, 1]


def _catalog_function(kind, m, params):
    """Function of the complex coordinates and its pole list"""
    center = _complex_center(params.get("center"), m)
    norm2 = lambda Z: sum(np.abs(z - c) ** 2 for z, c in zip(Z, center))
    if kind == "log_pole":
        c = float(params.get("coefficient", 1.0))
        poles = (np.column_stack([center.real, center.imag]).ravel(),)
        return (lambda *Z: c * np.log(norm2(Z))), poles
    if kind == "quadratic":
        a = float(params.get("coefficient", 1.0))
        offset = float(params.get("offset", 0.0))
        return (lambda *Z: a * norm2(Z) + offset), ()
    if kind == "smooth":
        a = float(params.get("coefficient", 1.0))
        return (lambda *Z: a * np.log1p(norm2(Z))), ()
    if kind == "mixture":
        parts = []
        poles = ()
        for component in params["components"]:
            func, found = _catalog_function(component["kind"], m, component.get("params", {}))
            parts.append((float(component.get("weight", 1.0)), func))
            poles += found
        return (lambda *Z: sum(w * f(*Z) for w, f in parts)), poles
    raise ParseError(f"unknown chart kind <{kind}>, use one of {CHART_KINDS}")


def chart_from_catalog(kind, m=1, radius=1.0, spacing=1.0 / 64, name=None, **params):
    """Plurisubharmonic chart from the catalog

    ``log_pole`` is c log|z - a|^2, ``quadratic`` a |z - a|^2 + b, ``smooth``
    a log(1 + |z - a|^2) and ``mixture`` a weighted sum of ``components``.
    Centers are given as m [re, im] pairs.
    """
    func, poles = _catalog_function(kind, m, params)
    return ChartPotential.from_function(func, m, radius, spacing, psh=True, poles=poles, name=name or kind)


def chart_from_dict(alldata, path="<dict>"):
    if not isinstance(alldata, dict):
        raise ParseError("chart file must contain a mapping", path)
    line = alldata.get("__line__")
    if alldata.get("kind") not in CHART_KINDS:
        raise ParseError(f"chart needs <kind> in {CHART_KINDS}", path, line)
    try:
        return chart_from_catalog(
            alldata["kind"],
            int(alldata.get("m", 1)),
            float(alldata.get("radius", 1.0)),
            float(alldata.get("spacing", 1.0 / 64)),
            name=alldata.get("name"),
            **strip_lines(alldata.get("params") or {}),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (ParseError, ResolutionError)):
            raise
        raise ParseError(f"bad chart parameters ({e})", path, line) from e


def load_chart(filename):
    """Load a chart description from package data or a local file"""
    path = locate(CHART_DIR, filename, "chart")
    return chart_from_dict(read_yaml(path), str(path))


def available_charts():
    return packaged(CHART_DIR)
