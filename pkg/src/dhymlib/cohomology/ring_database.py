""" Ring database utilities
"""

import logging
import os

import yaml

from ..datafiles import locate, packaged, read_yaml, strip_lines as _strip, yml_name
from ..errors import ParseError
from .ring import ToyRing

logger = logging.getLogger(__name__)

RING_DIR = "data/rings"


def _tensor_entries(entries, path, where, basis, dim):
    if entries is None:
        return []
    if not isinstance(entries, list):
        raise ParseError(f"{where} must be a list of {{index, value}} entries", path)
    out = []
    for entry in entries:
        line = entry.get("__line__") if isinstance(entry, dict) else None
        if not isinstance(entry, dict) or "index" not in entry or "value" not in entry:
            raise ParseError(f"{where}: entry {_strip(entry)} needs <index> and <value>", path, line)
        index = tuple(entry["index"]) if isinstance(entry["index"], list) else (entry["index"],)
        unknown = [label for label in index if label not in basis]
        if unknown or len(index) != dim:
            reason = f"unknown labels {unknown}" if unknown else f"length {len(index)}, expected {dim}"
            raise ParseError(f"{where}: bad tensor entry {index}, {reason}", path, line)
        out.append((index, entry["value"]))
    return out


def ring_from_dict(alldata, path="<dict>"):
    """Build a ToyRing from the parsed content of a ring file

    Errors are reported with the file path and the line of the offending mapping.
    """
    if not isinstance(alldata, dict):
        raise ParseError("ring file must contain a mapping", path)
    line = alldata.get("__line__")
    for key in ("name", "dim", "basis", "intersection"):
        if key not in alldata:
            raise ParseError(f"missing key <{key}>", path, line)
    basis, n = list(alldata["basis"]), int(alldata["dim"])
    subvarieties = []
    for cycle in alldata.get("subvarieties") or []:
        cline = cycle.get("__line__")
        try:
            label, dim = cycle["label"], int(cycle["dim"])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"subvariety needs <label> and integer <dim> ({e})", path, cline) from e
        subvarieties.append((str(label), dim, _tensor_entries(cycle.get("tensor"), path, f"subvariety <{label}>", basis, dim)))
    families = {}
    for family in alldata.get("families") or []:
        fline = family.get("__line__")
        missing = [k for k in ("name", "alpha", "beta", "direction") if k not in family]
        if missing:
            raise ParseError(f"family misses {', '.join(missing)}", path, fline)
        families[family["name"]] = _strip({k: v for k, v in family.items() if k != "name"})
    intersection = _tensor_entries(alldata["intersection"], path, "intersection", basis, n)
    try:
        # errors raised here carry the location of the whole ring
        return ToyRing(
            alldata["name"],
            n,
            basis,
            intersection,
            subvarieties,
            positivity=alldata.get("positivity", "nakai"),
            families=families,
        )
    except ParseError as e:
        raise ParseError(str(e), path, line) from e


class RingDatabase:
    """Rings loaded from package data or local files, indexed by ring name"""

    def __init__(self):
        self.rings = {}

    def locate(self, filename):
        """Path of a ring file, local files shadow package data

        Raises
        ------

        FileNotFoundError
            When the file is found neither in the package rings nor locally.
        """
        return locate(RING_DIR, filename, "ring")

    def load_ring(self, filename):
        """Load a ring file into the database and return the ring"""
        path = self.locate(filename)
        alldata = read_yaml(path)
        ring = ring_from_dict(alldata, path=str(path))
        self.rings[ring.name] = ring
        return ring

    def dump_ring(self, name, filename):
        with open(yml_name(filename), "w") as ymlfile:
            yaml.safe_dump(self.rings[name].minimal_dict(), ymlfile, sort_keys=False)

    @staticmethod
    def available():
        """Names of packaged and local ring files, as (name, origin) pairs"""
        found = [(name, "dhymlib") for name in packaged(RING_DIR)]
        for entry in sorted(os.listdir(".")):
            if entry.endswith(".yml") and os.path.isfile(entry):
                with open(entry, "r") as ymlfile:
                    try:
                        head = yaml.safe_load(ymlfile)
                    except yaml.YAMLError:
                        continue
                if isinstance(head, dict) and {"basis", "intersection"} <= set(head):
                    found.append((entry[:-4], "local"))
        return sorted(found)

    def __str__(self) -> str:
        out = "---------- current rings ---------\n"
        for name in self.rings:
            out += f"* {name}\n"
        out += "----------------------------------"
        return out

    def __getitem__(self, key):
        return self.rings[key]

    def __setitem__(self, key, value):
        self.rings[key] = value


def load_ring(filename):
    return RingDatabase().load_ring(filename)
