""" Calibration of the constants c0(n, theta), sigma0(n, theta) and C_n

The constants only exist qualitatively. ``sweep_c0`` searches the worst
configuration on a grid of angle splittings, ``sweep_sigma0`` runs random
hypotheses on a decreasing sigma ladder and ``envelope_sigma0`` is the closed
form the swept sigma0 is compared with. The table lives in
``data/calibration.yml``; its sigma0 rows hold the envelope until the table is
rebuilt with ``dhymlib calibrate --write``.
"""

from functools import lru_cache
from importlib import resources
import logging
import warnings

import numpy as np
import yaml

from ..errors import ConfigError, ParseError
from .angles import RelativePair, angle_Q, arccot
from .sampling import hermitian_with_spectrum, random_angles, random_hermitian, random_unitary

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_THETA_GRID = tuple(round(0.1 * i, 10) for i in range(1, 31))


def compositions(total, parts):
    """All tuples of ``parts`` nonnegative integers summing to ``total``"""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def sweep_c0(n, theta, levels=8, splits=8, eps_steps=16):
    """Smallest (theta - Q(lambda + eps)) / eps over a grid

    The grid covers angle splittings of Q(lambda) = theta * level / levels into n
    parts on a ``splits`` lattice and shifts eps in (0, theta). A zero angle stands
    for an infinite eigenvalue.
    """
    unit = np.array(list(compositions(splits, n)), dtype=float) / splits
    eps = theta * np.concatenate([[1e-3], np.arange(1, eps_steps) / eps_steps])
    best = np.inf
    for level in range(1, levels + 1):
        angles = theta * level / levels * unit
        with np.errstate(divide="ignore"):
            lam = 1.0 / np.tan(angles)
        shifted = arccot(lam[None, :, :] + eps[:, None, None])
        ratio = (theta - shifted.sum(axis=-1)) / eps[:, None]
        best = min(best, float(ratio.min()))
    return best


def envelope_sigma0(n, theta):
    """Closed-form admissible sigma0 stored in the packaged table"""
    tan_theta = abs(np.tan(theta))
    return 0.5 * min(1.0, tan_theta**0.25, (np.sin(theta) ** 2 / (4.0 * n)) ** (1.0 / 3.0))


def random_uniform_continuity_case(rng, n, theta, sigma):
    """Random (chi1, chi2, chi3, B) satisfying the uniform continuity hypotheses"""
    s5 = sigma**5
    chi2_reduced = hermitian_with_spectrum(rng, rng.uniform(s5 + 1e-3, 4.0 - s5, n))
    e = random_hermitian(rng, n)
    e /= max(np.abs(np.linalg.eigvalsh(e)).max(), 1e-300)
    chi1_reduced = chi2_reduced + s5 * rng.uniform(0.0, 1.0) * e
    # Q_chi2(B) < theta through relative angles
    values, vectors = np.linalg.eigh(chi2_reduced)
    sqrt_chi2 = (vectors * np.sqrt(values)) @ vectors.conj().T
    angles = random_angles(rng, n, theta * rng.uniform(0.05, 0.9999))
    B_reduced = sqrt_chi2 @ hermitian_with_spectrum(rng, 1.0 / np.tan(angles)) @ sqrt_chi2
    # move chi3 away from the identity
    s = random_unitary(rng, n) * rng.uniform(0.5, 2.0, n)
    congruence = lambda m: s.conj().T @ m @ s
    return congruence(chi1_reduced), congruence(chi2_reduced), congruence(np.eye(n)), congruence(B_reduced)


def sweep_sigma0(n, theta, rng, samples=200, ladder=None):
    """Largest sigma of a decreasing ladder with no failure on random cases"""
    if ladder is None:
        ladder = np.geomspace(0.9, 1e-3, 24)
    for sigma in ladder:
        failures = 0
        for _ in range(samples):
            chi1, chi2, chi3, B = random_uniform_continuity_case(rng, n, theta, sigma)
            if angle_Q(RelativePair(chi1, B + sigma * chi3), n) >= theta:
                failures += 1
                break
        if failures == 0:
            return float(sigma)
    warnings.warn(f"sigma0 sweep found no admissible sigma for n={n}, theta={theta}")
    return 0.0


def term_bound_C_n(n):
    """Constant of the S + G domination from the term by term bound"""
    return float(2 * (2**n - 1))


class CalibrationTable:
    """Calibrated constants indexed by dimension and a theta grid

    Lookups between two grid points return the smaller of the two bracketing
    entries; angles outside the grid raise ConfigError.
    """

    def __init__(self, theta_grid, c0, sigma0, C_n, generator=None, schema_version=SCHEMA_VERSION):
        self.theta_grid = np.asarray(theta_grid, dtype=float)
        self.c0_table = {int(k): np.asarray(v, dtype=float) for k, v in c0.items()}
        self.sigma0_table = {int(k): np.asarray(v, dtype=float) for k, v in sigma0.items()}
        self.C_n_table = {int(k): float(v) for k, v in C_n.items()}
        self.generator = generator or {}
        self.schema_version = schema_version
        for name, table in (("c0", self.c0_table), ("sigma0", self.sigma0_table)):
            for n, values in table.items():
                if values.shape != self.theta_grid.shape:
                    raise ParseError(f"calibration table {name}[{n}] does not match theta grid")

    def _lookup(self, name, table, n, theta):
        if n not in table:
            raise ConfigError(f"calibration.{name}", f"no entry for n={n}")
        grid = self.theta_grid
        if not grid[0] - 1e-12 <= theta <= grid[-1] + 1e-12:
            raise ConfigError(f"calibration.{name}", f"theta={theta:.4g} outside [{grid[0]}, {grid[-1]}]")
        i = int(np.clip(np.searchsorted(grid, theta), 0, len(grid) - 1))
        if np.isclose(grid[i], theta, rtol=0.0, atol=1e-12) or i == 0:
            return float(table[n][i])
        return float(min(table[n][i - 1], table[n][i]))

    def c0(self, n, theta):
        return self._lookup("c0", self.c0_table, n, theta)

    def sigma0(self, n, theta):
        return self._lookup("sigma0", self.sigma0_table, n, theta)

    def C_n(self, n):
        if n not in self.C_n_table:
            raise ConfigError("calibration.C_n", f"no entry for n={n}")
        return self.C_n_table[n]

    def minimal_dict(self):
        return {
            "schema_version": self.schema_version,
            "generator": self.generator,
            "theta_grid": [float(t) for t in self.theta_grid],
            "c0": {n: [float(round(v, 6)) for v in values] for n, values in self.c0_table.items()},
            "sigma0": {n: [float(round(v, 6)) for v in values] for n, values in self.sigma0_table.items()},
            "C_n": dict(self.C_n_table),
        }

    def dump(self, filename):
        with open(filename, "w") as ymlfile:
            yaml.safe_dump(self.minimal_dict(), ymlfile, sort_keys=False)

    @classmethod
    def from_dict(cls, alldata, path="<dict>"):
        try:
            version = alldata["schema_version"]
            if version != SCHEMA_VERSION:
                raise ParseError(f"unsupported calibration schema {version}", path=path)
            return cls(
                alldata["theta_grid"],
                alldata["c0"],
                alldata["sigma0"],
                alldata["C_n"],
                generator=alldata.get("generator"),
                schema_version=version,
            )
        except KeyError as e:
            raise ParseError(f"calibration file misses key {e}", path=path) from e

    @classmethod
    def load(cls, filename):
        with open(filename, "r") as ymlfile:
            return cls.from_dict(yaml.safe_load(ymlfile), path=str(filename))


@lru_cache(maxsize=None)
def default_table():
    """Calibration table shipped with the package"""
    source = resources.files("dhymlib").joinpath("data/calibration.yml")
    with source.open("r") as ymlfile:
        return CalibrationTable.from_dict(yaml.safe_load(ymlfile), path="dhymlib:data/calibration.yml")


def build_table(
    dims=range(1, 7),
    theta_grid=DEFAULT_THETA_GRID,
    safety=0.5,
    levels=8,
    splits=8,
    eps_steps=16,
    sigma_samples=200,
    seed=0,
    sigma_ladder=None,
):
    """Recompute the calibration table

    c0 is ``safety`` times the grid sweep minimum, sigma0 ``safety`` times the
    random sweep of ``sweep_sigma0`` and C_n the term by term bound. Grid points
    where the closed-form envelope exceeds the swept sigma0 are logged.
    """
    rng = np.random.default_rng(seed)
    c0 = {}
    sigma0 = {}
    for n in dims:
        logger.info(f"calibrating n = {n}")
        c0[n] = [safety * sweep_c0(n, theta, levels, splits, eps_steps) for theta in theta_grid]
        sigma0[n] = [safety * sweep_sigma0(n, theta, rng, sigma_samples, sigma_ladder) for theta in theta_grid]
        above = [theta for theta, s in zip(theta_grid, sigma0[n]) if envelope_sigma0(n, theta) > s]
        if above:
            logger.warning(f"sigma0 envelope above the sweep for n = {n} at theta = {above}")
    generator = {
        "c0": {"method": "grid sweep", "levels": levels, "splits": splits, "eps_steps": eps_steps, "safety": safety},
        "sigma0": {
            "method": "random sweep",
            "samples": sigma_samples,
            "seed": seed,
            "ladder": "geomspace(0.9, 1e-3, 24)" if sigma_ladder is None else [float(s) for s in sigma_ladder],
            "safety": safety,
        },
        "C_n": {"method": "term bound", "formula": "2 (2^n - 1)"},
    }
    return CalibrationTable(theta_grid, c0, sigma0, {n: term_bound_C_n(n) for n in dims}, generator)
