""" Constants of the product subsolution on X x P^m
"""

from dataclasses import asdict, dataclass
import logging

import numpy as np

from ..errors import HypothesisViolated
from ..hermitian.angles import K_lower_bound, arccot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwistedConstants:
    """Vertical eigenvalue K and the angles it induces

    ``zeta_K`` is the vertical angle m arccot(K), ``theta_tilde0`` the phase seen
    on the product. ``Theta0`` and ``Theta_tilde0`` are only set by the variant
    with an upper bound of the Q functional.
    """

    theta0: float
    n: int
    m: int
    K: float
    zeta_K: float
    theta_tilde0: float
    Theta0: float = None
    Theta_tilde0: float = None

    @property
    def vertical_mass(self):
        """(Re, Im) of (K + i)^m"""
        z = (self.K + 1j) ** self.m
        return float(z.real), float(z.imag)

    @property
    def cot_gap(self):
        """cot(theta0) - cot(theta_tilde0), positive"""
        return 1.0 / np.tan(self.theta0) - 1.0 / np.tan(self.theta_tilde0)

    def to_dict(self):
        out = asdict(self)
        out["R_K"], out["I_K"] = self.vertical_mass
        return out


def compute_constants(theta0, n, m=None, Theta0=None, K=None):
    """Constants K, zeta_K and theta_tilde0 of the twisted subsolution

    Without ``Theta0`` the vertical dimension is ``m`` (default ``n``) and K must
    exceed cot((pi - theta0) / n) so that theta_tilde0 = theta0 + m arccot(K) < pi.
    The default is K = cot((pi - theta0) / 2n).

    With ``Theta0`` both bounds are shifted by n arccot(K) and K must lie in
    (cot((pi - Theta0) / n), cot(Theta0 - theta0)); the default is the cotangent
    of the middle of the corresponding angle interval.

    Parameters
    ----------

    theta0 : float
        Phase in (0, pi).
    n : int
        Dimension of X.
    m : int, optional
        Vertical dimension.
    Theta0 : float, optional
        Upper bound of the Q functional.
    K : float, optional

    Returns
    -------

    TwistedConstants

    Raises
    ------

    HypothesisViolated
        When K or the angles are outside their admissible ranges.
    """
    if not 0.0 < theta0 < np.pi:
        raise HypothesisViolated(f"theta0 = {theta0} not in (0, pi)")
    if n < 1:
        raise HypothesisViolated(f"dimension n = {n} must be >= 1")

    if Theta0 is None:
        m = n if m is None else int(m)
        low = K_lower_bound(n, theta0)
        if K is None:
            K = 1.0 / np.tan((np.pi - theta0) / (2 * n))
        if not K > low:
            raise HypothesisViolated(f"K = {K} must exceed cot((pi - theta0) / n) = {low:.6g}")
        zeta = float(m * arccot(K))
        if not theta0 + zeta < np.pi:
            raise HypothesisViolated(f"theta0 + m arccot(K) = {theta0 + zeta:.6g} is not below pi")
        return TwistedConstants(float(theta0), n, m, float(K), zeta, float(theta0 + zeta))

    if not theta0 < Theta0 < np.pi:
        raise HypothesisViolated(f"need theta0 < Theta0 < pi, got {theta0}, {Theta0}")
    low_angle = Theta0 - theta0
    high_angle = (np.pi - Theta0) / n
    if not low_angle < high_angle:
        raise HypothesisViolated("Theta0 - theta0 < (pi - Theta0) / n fails, no admissible K")
    if K is None:
        K = 1.0 / np.tan(0.5 * (low_angle + high_angle))
    if not K_lower_bound(n, Theta0) < K < 1.0 / np.tan(low_angle):
        raise HypothesisViolated(f"K = {K} outside (cot((pi - Theta0) / n), cot(Theta0 - theta0))")
    zeta = float(n * arccot(K))
    logger.debug(f"constants with Theta0: K = {K:.6g}, shift = {zeta:.6g}")
    return TwistedConstants(
        float(theta0), n, n, float(K), zeta, float(theta0 + zeta), float(Theta0), float(Theta0 + zeta)
    )
