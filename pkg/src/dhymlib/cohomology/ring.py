""" Toy cohomology rings with exact intersection numbers
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Number

import numpy as np

from ..errors import BadOrder, ParseError, UnknownCycle

FULL_SPACE = "X"
POSITIVITY_RULES = ("coefficients", "nakai")


def as_fraction(value):
    """Exact rational from an int, a float, a Fraction or a string like ``"1/2"``"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not intersection numbers")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to a rational number")


@lru_cache(maxsize=None)
def distinct_permutations(key):
    return tuple(set(permutations(key)))


@dataclass(frozen=True)
class Subvariety:
    """Cycle of dimension ``dim`` with its evaluation tensor

    The tensor maps sorted tuples of ``dim`` basis indices to the rational number
    b_i1 ... b_im . Y.
    """

    label: str
    dim: int
    tensor: dict = field(repr=False, compare=False)

    def evaluate(self, factors):
        """Multilinear evaluation of ``dim`` coefficient vectors"""
        if len(factors) != self.dim:
            raise BadOrder(f"{len(factors)} classes evaluated on cycle <{self.label}> of dimension {self.dim}")
        if self.dim == 0:
            return self.tensor.get((), Fraction(0))
        total = Fraction(0)
        for key, value in self.tensor.items():
            for perm in distinct_permutations(key):
                product = value
                for coefficients, index in zip(factors, perm):
                    product *= coefficients[index]
                    if not product:
                        break
                total += product
        return total


class ToyRing:
    """Finite presentation of the (1,1) part of a cohomology ring

    Parameters
    ----------

    name : str
        Name of the ring.
    n : int
        Complex dimension.
    basis : list of str
        Labels of the (1,1)-classes.
    intersection : dict
        Sparse symmetric n-linear tensor, keys are tuples of basis labels or indices
        (any order), values rationals.
    subvarieties : list of tuple, optional
        ``(label, dim, tensor)`` with sparse tensors as for ``intersection``.
    positivity : str, optional
        Kähler test used for classes: ``"coefficients"`` when positivity means
        positive coefficients, ``"nakai"`` for c^m . Y > 0 on every declared cycle.
    families : dict, optional
        Named test families as dicts of ``alpha``, ``beta``, ``direction`` class
        mappings and an optional threshold ``T``.
    """

    def __init__(self, name, n, basis, intersection, subvarieties=(), positivity="nakai", families=None):
        self.name = name
        self.n = int(n)
        self.basis = tuple(basis)
        if len(set(self.basis)) != len(self.basis):
            raise ParseError(f"ring <{name}> has repeated basis labels")
        if FULL_SPACE in self.basis:
            raise ParseError(f"<{FULL_SPACE}> is reserved for the full space")
        if positivity not in POSITIVITY_RULES:
            raise ParseError(f"unknown positivity rule <{positivity}>, use one of {POSITIVITY_RULES}")
        self.positivity = positivity
        self._cycles = {FULL_SPACE: Subvariety(FULL_SPACE, self.n, self._sparse_tensor(FULL_SPACE, self.n, intersection))}
        for label, dim, tensor in subvarieties:
            if label in self._cycles:
                raise ParseError(f"cycle <{label}> declared twice")
            if not 0 <= dim < self.n:
                raise ParseError(f"cycle <{label}> has dimension {dim}, expected 0..{self.n - 1}")
            self._cycles[label] = Subvariety(label, int(dim), self._sparse_tensor(label, int(dim), tensor))
        self.families = dict(families or {})

    def _index(self, label):
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < len(self.basis):
                raise IndexError(label)
            return int(label)
        try:
            return self.basis.index(label)
        except ValueError:
            raise ParseError(f"unknown basis label <{label}> in ring <{self.name}>") from None

    def _sparse_tensor(self, cycle, dim, entries):
        tensor = {}
        items = entries.items() if isinstance(entries, dict) else entries
        for raw_key, raw_value in items:
            key = (raw_key,) if isinstance(raw_key, (str, int)) else tuple(raw_key)
            if len(key) != dim:
                raise ParseError(f"tensor entry {raw_key} of cycle <{cycle}> has length {len(key)}, expected {dim}")
            try:
                sorted_key = tuple(sorted(self._index(k) for k in key))
                value = as_fraction(raw_value)
            except (IndexError, TypeError, ValueError, ZeroDivisionError) as e:
                raise ParseError(f"tensor entry {raw_key} of cycle <{cycle}>: {e}") from e
            if sorted_key in tensor and tensor[sorted_key] != value:
                raise ParseError(f"tensor entry {raw_key} of cycle <{cycle}> conflicts with a symmetric entry")
            if value:
                tensor[sorted_key] = value
        return tensor

    @property
    def rank(self):
        return len(self.basis)

    def subvariety(self, label):
        try:
            return self._cycles[label]
        except KeyError:
            raise UnknownCycle(f"cycle <{label}> not in ring <{self.name}>") from None

    def cycles(self):
        return list(self._cycles)

    def proper_cycles(self):
        return [label for label in self._cycles if label != FULL_SPACE]

    def curves(self):
        return [label for label, cycle in self._cycles.items() if cycle.dim == 1]

    def cls(self, coefficients=None, **by_label):
        """Class vector from a mapping label -> coefficient (missing labels are 0)"""
        mapping = dict(coefficients or {})
        mapping.update(by_label)
        values = [Fraction(0)] * self.rank
        for label, value in mapping.items():
            values[self._index(label)] = as_fraction(value)
        return ClassVector(self, tuple(values))

    def zero(self):
        return self.cls()

    def intersect(self, Y, factors):
        """Exact intersection number factors[0] ... factors[m-1] . Y"""
        cycle = self.subvariety(Y)
        for c in factors:
            if c.ring is not self:
                raise ValueError(f"class from ring <{c.ring.name}> used in ring <{self.name}>")
        return cycle.evaluate([c.coefficients for c in factors])

    def volume(self, c, Y=FULL_SPACE):
        """c^m . Y"""
        return self.intersect(Y, [c] * self.subvariety(Y).dim)

    def is_kahler(self, c):
        """Positivity test of a class according to the ring positivity rule"""
        if self.positivity == "coefficients":
            return all(x > 0 for x in c.coefficients)
        return all(self.volume(c, Y) > 0 for Y in self.cycles() if self.subvariety(Y).dim > 0)

    def family(self, name):
        """TestFamilyClass declared under ``name``"""
        from .stability import TestFamilyClass

        try:
            data = self.families[name]
        except KeyError:
            raise KeyError(f"family <{name}> not declared in ring <{self.name}>") from None
        return TestFamilyClass(self.cls(data["alpha"]), self.cls(data["direction"]), self.cls(data["beta"]), data.get("T"))

    def minimal_dict(self):
        def entries(tensor):
            return [
                {"index": [self.basis[i] for i in key], "value": str(value) if value.denominator != 1 else value.numerator}
                for key, value in sorted(tensor.items())
            ]

        out = {
            "name": self.name,
            "dim": self.n,
            "basis": list(self.basis),
            "positivity": self.positivity,
            "intersection": entries(self._cycles[FULL_SPACE].tensor),
            "subvarieties": [
                {"label": cycle.label, "dim": cycle.dim, "tensor": entries(cycle.tensor)}
                for label, cycle in self._cycles.items()
                if label != FULL_SPACE
            ],
        }
        if self.families:
            out["families"] = [{"name": name, **data} for name, data in self.families.items()]
        return out

    def __str__(self):
        out = f"---------- ring {self.name} ---------\n"
        out += f"dimension {self.n}, basis {', '.join(self.basis)}\n"
        for label, cycle in self._cycles.items():
            out += f"* {label} (dim {cycle.dim})\n"
        out += "-" * (len(self.name) + 26)
        return out


@dataclass(frozen=True, eq=False)
class ClassVector:
    """Rational coefficients of a (1,1)-class over the ring basis"""

    ring: ToyRing = field(repr=False, compare=False)
    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) != self.ring.rank:
            raise ValueError(f"{len(self.coefficients)} coefficients for a basis of size {self.ring.rank}")
        object.__setattr__(self, "coefficients", tuple(as_fraction(c) for c in self.coefficients))

    def _check(self, other):
        if not isinstance(other, ClassVector):
            return NotImplemented
        if other.ring is not self.ring:
            raise ValueError("classes from different rings")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ClassVector(self.ring, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ClassVector(self.ring, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self):
        return ClassVector(self.ring, tuple(-a for a in self.coefficients))

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        s = as_fraction(scalar)
        return ClassVector(self.ring, tuple(s * a for a in self.coefficients))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ClassVector) and other.ring is self.ring and other.coefficients == self.coefficients

    def __hash__(self):
        return hash((self.ring.name, self.coefficients))

    def to_float(self):
        return np.array([float(c) for c in self.coefficients])

    def as_mapping(self):
        return {label: c for label, c in zip(self.ring.basis, self.coefficients) if c}

    def __str__(self):
        terms = [f"{c}{label}" if c != 1 else label for label, c in self.as_mapping().items()]
        return " + ".join(terms) if terms else "0"


def projective_space(n):
    """CP^n with hyperplane class H and linear subspaces of every dimension"""
    cycles = []
    names = {1: "line", 2: "plane"}
    for k in range(1, n):
        cycles.append((names.get(k, f"L{k}"), k, {("H",) * k: 1}))
    return ToyRing(f"CP{n}", n, ["H"], {("H",) * n: 1}, cycles, positivity="coefficients")


def blowup_cp2(k):
    """CP^2 blown up at k <= 3 general points

    Curves: a general line, the exceptional curves E_i, strict transforms of lines
    through one point (H - E_i) and through two points (H - E_i - E_j).
    """
    if not 0 <= k <= 3:
        raise ValueError("only k <= 3 blown up points are supported")
    exceptional = [f"E{i}" for i in range(1, k + 1)]
    basis = ["H"] + exceptional
    intersection = {("H", "H"): 1}
    intersection.update({(e, e): -1 for e in exceptional})
    cycles = [("line", 1, {("H",): 1})]
    for e in exceptional:
        cycles.append((e, 1, {(e,): -1}))
        cycles.append((f"H-{e}", 1, {("H",): 1, (e,): 1}))
    for i, ei in enumerate(exceptional):
        for ej in exceptional[i + 1 :]:
            cycles.append((f"H-{ei}-{ej}", 1, {("H",): 1, (ei,): 1, (ej,): 1}))
    name = "CP2" if k == 0 else f"CP2_blowup{k}"
    return ToyRing(name, 2, basis, intersection, cycles, positivity="nakai")


def complex_torus():
    """E x E with fiber classes f1, f2 and the diagonal, a rank 3 lattice"""
    intersection = {("f1", "f2"): 1, ("f1", "Delta"): 1, ("f2", "Delta"): 1}
    cycles = [
        ("F1", 1, {("f2",): 1, ("Delta",): 1}),
        ("F2", 1, {("f1",): 1, ("Delta",): 1}),
        ("diagonal", 1, {("f1",): 1, ("f2",): 1}),
    ]
    return ToyRing("torus_ExE", 2, ["f1", "f2", "Delta"], intersection, cycles, positivity="nakai")


def product_of_curves():
    """CP1 x CP1 with the two rulings and the diagonal"""
    cycles = [
        ("F1", 1, {("h2",): 1}),
        ("F2", 1, {("h1",): 1}),
        ("diagonal", 1, {("h1",): 1, ("h2",): 1}),
    ]
    return ToyRing("P1xP1", 2, ["h1", "h2"], {("h1", "h2"): 1}, cycles, positivity="coefficients")
