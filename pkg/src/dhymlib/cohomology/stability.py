""" Phase, central constraint and stability functional of toy rings

All intersection numbers are accumulated with exact rationals. A phase carries
its exact cotangent so that the central constraint vanishes identically; floating
point values are produced only when a result is returned.
"""

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from math import comb
import logging
import warnings

import numpy as np
import sympy

from ..errors import DegenerateVolume, HypothesisViolated, NoSupercriticalPhase
from .ring import FULL_SPACE, ClassVector, as_fraction

logger = logging.getLogger(__name__)

Verdict = namedtuple("Verdict", ["cycle", "dim", "verdict", "witness", "coefficients", "signs"])
CorollaryRow = namedtuple("CorollaryRow", ["cycle", "k", "value", "sign", "required", "holds"])


@dataclass(frozen=True)
class Phase:
    """Supercritical phase theta0 with its exact cotangent"""

    theta0: float
    cot: Fraction

    def __float__(self):
        return self.theta0


@dataclass(frozen=True, eq=False)
class TestFamilyClass:
    """Classes of a test family alpha_t = alpha + t gamma over the background beta

    Parameters
    ----------

    base : ClassVector
        alpha.
    direction : ClassVector
        gamma, must be positive on every declared curve.
    background : ClassVector
        beta.
    T : float, optional
        Declared threshold after which alpha_t - cot(theta0/n) beta is Kähler.
    """

    __test__ = False

    base: ClassVector
    direction: ClassVector
    background: ClassVector
    T: float = None

    def __post_init__(self):
        ring = self.base.ring
        if self.direction.ring is not ring or self.background.ring is not ring:
            raise ValueError("test family classes must live in the same ring")
        curves = ring.curves() or [FULL_SPACE]
        bad = [Y for Y in curves if ring.volume(self.direction, Y) <= 0]
        if bad:
            raise HypothesisViolated(f"direction {self.direction} is not positive on {', '.join(bad)}")

    @property
    def ring(self):
        return self.base.ring

    def at(self, t):
        """alpha_t"""
        return self.base + as_fraction(t) * self.direction


def _cot(theta0):
    if isinstance(theta0, Phase):
        return theta0.cot
    theta0 = float(theta0)
    return Fraction(np.cos(theta0) / np.sin(theta0))


def complex_intersection(ring, Y, alpha, beta, k, extra=()):
    """Exact (Re, Im) of (alpha + i beta)^k . extra . Y by binomial expansion"""
    re = Fraction(0)
    im = Fraction(0)
    for j in range(k + 1):
        value = comb(k, j) * ring.intersect(Y, [alpha] * (k - j) + [beta] * j + list(extra))
        # i^j
        if j % 4 == 0:
            re += value
        elif j % 4 == 1:
            im += value
        elif j % 4 == 2:
            re -= value
        else:
            im -= value
    return re, im


def phase_from_classes(alpha, beta):
    """Phase of z = (alpha + i beta)^n . X

    theta0 is the argument of z, the representative for which the central
    constraint Re z - cot(theta0) Im z = 0 holds with z e^{-i theta0} > 0.

    Raises
    ------

    DegenerateVolume
        If z = 0.
    NoSupercriticalPhase
        If the argument of z is not in (0, pi).
    """
    ring = alpha.ring
    re, im = complex_intersection(ring, FULL_SPACE, alpha, beta, ring.n)
    if re == 0 and im == 0:
        raise DegenerateVolume(f"(alpha + i beta)^{ring.n} vanishes on <{ring.name}>")
    if im <= 0:
        raise NoSupercriticalPhase(f"phase of {float(re):.6g} + {float(im):.6g}i is not in (0, pi)")
    theta0 = float(np.arctan2(float(im), float(re)))
    logger.debug(f"phase of {ring.name}: z = {re} + {im}i, theta0 = {theta0:.12f}")
    return Phase(theta0, re / im)


def theta0_from_classes(alpha, beta):
    return phase_from_classes(alpha, beta).theta0


def central_constraint(alpha, beta, theta0):
    """Re(alpha + i beta)^n . X - cot(theta0) Im(alpha + i beta)^n . X"""
    ring = alpha.ring
    re, im = complex_intersection(ring, FULL_SPACE, alpha, beta, ring.n)
    return float(re - _cot(theta0) * im)


def _stab_exact(Y, fam, theta0, alpha, k, extra=()):
    re, im = complex_intersection(fam.ring, Y, alpha, fam.background, k, extra)
    return re - _cot(theta0) * im


def stab_value(Y, fam, theta0, t):
    """Stability functional (Re - cot(theta0) Im)(alpha_t + i beta)^m . Y"""
    if t < 0:
        raise HypothesisViolated(f"t = {t} must be nonnegative")
    m = fam.ring.subvariety(Y).dim
    return float(_stab_exact(Y, fam, theta0, fam.at(t), m))


def stab_derivative(Y, fam, theta0, t):
    """d/dt of the stability functional, m (gamma (Re - cot Im)(alpha_t + i beta)^(m-1)) . Y"""
    m = fam.ring.subvariety(Y).dim
    if m == 0:
        return 0.0
    return float(m * _stab_exact(Y, fam, theta0, fam.at(t), m - 1, [fam.direction]))


def _stab_coefficients(Y, fam, theta0):
    m = fam.ring.subvariety(Y).dim
    return [comb(m, k) * _stab_exact(Y, fam, theta0, fam.base, k, [fam.direction] * (m - k)) for k in range(m + 1)]


def stab_poly_coeffs(Y, fam, theta0):
    """Coefficients c[0..m] with stab_value(t) = sum_k c[k] t^(m-k)

    c[k] = binom(m, k) (Re - cot(theta0) Im)(alpha + i beta)^k gamma^(m-k) . Y, so
    ``numpy.polyval(c, t)`` evaluates the functional.
    """
    return np.array([float(c) for c in _stab_coefficients(Y, fam, theta0)])


def _sign(x):
    return "+" if x > 0 else "-" if x < 0 else "0"


def default_t_grid(t_max=10.0, points=65):
    return np.concatenate([[0.0], np.geomspace(1e-3, t_max, points - 1)])


def sturm_decide(coefficients, strict, t_max=None):
    """Exact sign decision of a polynomial on [0, t_max] with Sturm sequences

    Parameters
    ----------

    coefficients : list of Fraction
        Highest degree first.
    strict : bool
        Whether a zero value counts as a failure.
    t_max : float, optional
        Right end of the interval, the Cauchy root bound when omitted (then the
        decision covers all t >= 0 provided the leading coefficient is positive).

    Returns
    -------

    tuple
        (holds, witness) with ``witness`` a t where the sign condition fails.
    """
    t = sympy.Symbol("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coefficients], t)
    if poly.is_zero:
        return (not strict), (0.0 if strict else None)
    if poly.degree() == 0:
        value = poly.LC()
        holds = bool(value > 0) if strict else bool(value >= 0)
        return holds, None if holds else 0.0
    if t_max is None:
        lead = poly.LC()
        # Cauchy bound, every real root lies below it
        upper = 1 + max(abs(c / lead) for c in poly.all_coeffs()[1:])
        if lead < 0:
            return False, float(upper)
    else:
        upper = sympy.Rational(*Fraction(t_max).as_integer_ratio())
    if poly.count_roots(0, upper) == 0:
        value = poly.eval(0)
        return bool(value > 0), None if value > 0 else 0.0
    roots = sorted(float(r) for r in poly.real_roots() if 0 <= r <= upper)
    if strict:
        return False, roots[0]
    # touching roots are allowed, look for a negative value between them
    points = [0.0] + [0.5 * (a + b) for a, b in zip(roots, roots[1:] + [float(upper) + 1.0])]
    for point in points:
        if poly.eval(sympy.Rational(*Fraction(point).as_integer_ratio())) < 0:
            return False, point
    return True, None


def _verdict(label, m, coefficients, t_grid, proper, sturm, t_max):
    signs = "".join(_sign(c) for c in coefficients)
    floats = [float(c) for c in coefficients]
    if all(c > 0 for c in coefficients) or (not proper and all(c >= 0 for c in coefficients)):
        return Verdict(label, m, "stable", None, floats, signs)
    values = [sum(c * Fraction(t) ** (m - k) for k, c in enumerate(coefficients)) for t in t_grid]
    for t, value in zip(t_grid, values):
        if value < 0 or (proper and value == 0):
            return Verdict(label, m, "unstable", float(t), floats, signs)
    if sturm:
        holds, witness = sturm_decide(coefficients, strict=proper, t_max=t_max)
        if holds:
            return Verdict(label, m, "stable", None, floats, signs)
        if witness is not None:
            return Verdict(label, m, "unstable", float(witness), floats, signs)
        warnings.warn(f"Sturm check could not decide the sign on cycle <{label}>")
    logger.info(f"cycle <{label}>: coefficient signs {signs}, grid values positive, inconclusive")
    return Verdict(label, m, "inconclusive", None, floats, signs)


def check_stable(fam, theta0, cycles=None, t_grid=None, sturm=False, t_max=None, margins=None):
    """Stability verdict on every cycle

    Proper cycles need a positive functional for all t >= 0, the full space a
    nonnegative one. Positive coefficients prove stability; a negative value on
    ``t_grid`` gives an unstable verdict with the witness t; otherwise the verdict
    is inconclusive unless the Sturm check is requested.

    Parameters
    ----------

    fam : TestFamilyClass
    theta0 : Phase or float
    cycles : list of str, optional
        Cycle labels, every declared cycle by default.
    t_grid : array_like, optional
        Sample values of t, ``default_t_grid()`` by default.
    sturm : bool
        Decide inconclusive cases exactly with Sturm sequences.
    t_max : float, optional
        Interval of the Sturm decision, the Cauchy root bound by default.
    margins : dict, optional
        Exact amount subtracted from the constant coefficient per cycle.

    Returns
    -------

    list of Verdict
    """
    ring = fam.ring
    cycles = ring.cycles() if cycles is None else list(cycles)
    t_grid = default_t_grid() if t_grid is None else [float(t) for t in t_grid]
    verdicts = []
    for label in cycles:
        m = ring.subvariety(label).dim
        coefficients = _stab_coefficients(label, fam, theta0)
        if margins:
            coefficients[m] -= margins.get(label, 0)
        verdicts.append(_verdict(label, m, coefficients, t_grid, label != FULL_SPACE, sturm, t_max))
    return verdicts


def check_uniform_stable(fam, theta0, eps, chi_class, cycles=None, t_grid=None, sturm=False, t_max=None):
    """Stability verdicts with the margin (n - m) eps chi^m . Y subtracted"""
    if eps < 0:
        raise HypothesisViolated(f"eps = {eps} must be nonnegative")
    ring = fam.ring
    cycles = ring.proper_cycles() if cycles is None else list(cycles)
    eps = as_fraction(eps)
    margins = {Y: (ring.n - ring.subvariety(Y).dim) * eps * ring.volume(chi_class, Y) for Y in cycles}
    return check_stable(fam, theta0, cycles, t_grid, sturm, t_max, margins)


def overall(verdicts):
    """Aggregate verdict of a list of per-cycle verdicts"""
    kinds = {v.verdict for v in verdicts}
    if "unstable" in kinds:
        return "unstable"
    if "inconclusive" in kinds:
        return "inconclusive"
    return "stable"


def corollary_C_hypotheses(alpha, beta, gamma, theta0, cycles=None):
    """Table of (Re - cot(theta0) Im)(alpha + i beta)^k gamma^(m-k) . Y for 1 <= k <= m

    The full space requires nonnegative entries and proper cycles positive ones.
    """
    ring = alpha.ring
    cycles = ring.cycles() if cycles is None else list(cycles)
    rows = []
    for label in cycles:
        m = ring.subvariety(label).dim
        proper = label != FULL_SPACE
        for k in range(1, m + 1):
            re, im = complex_intersection(ring, label, alpha, beta, k, [gamma] * (m - k))
            value = re - _cot(theta0) * im
            holds = value > 0 if proper else value >= 0
            rows.append(CorollaryRow(label, k, float(value), _sign(value), ">0" if proper else ">=0", bool(holds)))
    return rows


def family_condition_C(fam, theta0, chi_class, T=None):
    """Class inequality alpha_T - cot(theta0 / n) chi is Kähler

    The test uses the positivity rule of the ring, exact on rings where positivity
    is coefficient positivity and a Nakai check over the declared cycles otherwise.
    """
    ring = fam.ring
    T = fam.T if T is None else T
    if T is None:
        raise HypothesisViolated("no threshold T declared for the test family")
    theta0 = float(theta0)
    threshold = Fraction(np.cos(theta0 / ring.n) / np.sin(theta0 / ring.n))
    return ring.is_kahler(fam.at(T) - threshold * chi_class)
