""" Problem files of the torus solver

A problem file is a YAML mapping::

    name: manufactured_m1
    m: 1
    grid: [256, 256]
    theta0: 1.5707963267948966
    Theta0: 2.5
    chi: [[[1.0, 0.0]]]
    omega0: [[[1.0, 0.0]]]
    twist:
      kind: manufactured
      modes:
        - {amplitude: 0.1, wavevector: [1, 0], phase: cos}

Matrices are row-major lists of [re, im] pairs. The twist kinds are
``constant`` (``value``), ``cosine`` (``base`` plus ``modes``),
``manufactured`` (``modes``, the exact potential) and ``grid`` (``values`` as a
row-major list or ``file``, a potential dump).
"""

import csv
import logging
import os

import numpy as np

from ..datafiles import locate, packaged, read_yaml, strip_lines
from ..errors import DhymError, ParseError
from .torus import TorusProblem, manufactured_twist, trigonometric_potential

logger = logging.getLogger(__name__)

PROBLEM_DIR = "data/problems"
TWIST_KINDS = ("constant", "cosine", "manufactured", "grid")


def parse_matrix(entry, m, path=None, line=None, name="matrix"):
    """Hermitian m x m matrix from rows of [re, im] pairs"""
    try:
        array = np.asarray(entry, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"<{name}> is not numeric ({e})", path, line) from e
    if array.shape != (m, m, 2):
        raise ParseError(f"<{name}> has shape {array.shape}, expected {(m, m, 2)} ([re, im] pairs)", path, line)
    return array[..., 0] + 1j * array[..., 1]


def format_matrix(matrix):
    matrix = np.asarray(matrix, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def read_potential_csv(filename, grid):
    """Potential dump with one (index, value) row per grid point"""
    size = int(np.prod(grid))
    values = np.full(size, np.nan)
    with open(filename, "r", newline="") as csvfile:
        reader = csv.reader(csvfile)
        header = next(reader, None)
        if header != ["index", "value"]:
            raise ParseError(f"header {header} differs from ['index', 'value']", filename, 1)
        for lineno, row in enumerate(reader, start=2):
            try:
                index, value = int(row[0]), float(row[1])
                values[index] = value
            except (IndexError, ValueError) as e:
                raise ParseError(f"bad row {row} ({e})", filename, lineno) from e
    if np.isnan(values).any():
        raise ParseError(f"{int(np.isnan(values).sum())} grid points missing for grid {tuple(grid)}", filename)
    return values.reshape(grid)


def write_potential_csv(phi, filename):
    """Dump a potential as (index, value) rows in row-major order"""
    with open(filename, "w", newline="") as csvfile:
        writer = csv.writer(csvfile)
        writer.writerow(["index", "value"])
        for index, value in enumerate(phi.values.ravel()):
            writer.writerow([index, repr(float(value))])


def _twist(entry, base, path, directory):
    line = entry.get("__line__") if isinstance(entry, dict) else None
    if not isinstance(entry, dict) or entry.get("kind") not in TWIST_KINDS:
        raise ParseError(f"twist needs <kind> in {TWIST_KINDS}", path, line)
    kind = entry["kind"]
    grid = base["grid"]
    try:
        if kind == "constant":
            return float(entry["value"]), None
        if kind == "cosine":
            waves = trigonometric_potential(grid, strip_lines(entry.get("modes") or []))
            return float(entry["base"]) + waves.values, None
        if kind == "manufactured":
            exact = trigonometric_potential(grid, strip_lines(entry["modes"]), float(entry.get("scale", 1.0)))
            partial = TorusProblem(f=0.0, **base)
            return manufactured_twist(partial, exact), exact
        if "file" in entry:
            filename = entry["file"]
            if directory and not os.path.isabs(filename) and not os.path.exists(filename):
                filename = os.path.join(directory, filename)
            return read_potential_csv(filename, grid), None
        return np.asarray(entry["values"], dtype=float).reshape(grid), None
    except DhymError:
        raise
    except KeyError as e:
        raise ParseError(f"twist of kind <{kind}> misses {e}", path, line) from e
    except (TypeError, ValueError) as e:
        raise ParseError(f"twist of kind <{kind}>: {e}", path, line) from e


def problem_from_dict(alldata, path="<dict>", directory=None):
    """Build a TorusProblem from the parsed content of a problem file"""
    if not isinstance(alldata, dict):
        raise ParseError("problem file must contain a mapping", path)
    line = alldata.get("__line__")
    missing = [k for k in ("m", "grid", "theta0", "Theta0", "chi", "omega0", "twist") if k not in alldata]
    if missing:
        raise ParseError(f"missing keys {missing}", path, line)
    m = int(alldata["m"])
    base = dict(
        m=m,
        grid=tuple(alldata["grid"]),
        omega0=parse_matrix(alldata["omega0"], m, path, line, "omega0"),
        chi=parse_matrix(alldata["chi"], m, path, line, "chi"),
        theta0=float(alldata["theta0"]),
        Theta0=float(alldata["Theta0"]),
        twist_floor=float(alldata.get("twist_floor", 0.0)),
        name=str(alldata.get("name", os.path.basename(str(path)).rsplit(".", 1)[0])),
    )
    f, exact = _twist(alldata["twist"], base, path, directory)
    return TorusProblem(f=f, exact=exact, **base)


def load_problem(filename):
    """Load a problem from package data or a local file

    Raises
    ------

    FileNotFoundError
        When the file is found neither in the package problems nor locally.
    ParseError
        On malformed content, with the line of the offending mapping.
    """
    path = locate(PROBLEM_DIR, filename, "problem")
    directory = os.path.dirname(path) if isinstance(path, str) else None
    return problem_from_dict(read_yaml(path), str(path), directory)


def available_problems():
    return packaged(PROBLEM_DIR)
