""" Exact (p,q)-forms with constant coefficients on C^n

A form is stored as a map ``(I, J) -> c`` meaning ``c dz^I ^ dzbar^J`` where I and J
are strictly increasing index tuples (0-based) and all holomorphic differentials
come first. With this ordering

    conj(c dz^I ^ dzbar^J) = (-1)^(|I||J|) conj(c) dz^J ^ dzbar^I

and a Hermitian matrix ``a`` gives the real (1,1)-form ``i sum a_jk dz^j ^ dzbar^k``.
The volume form of the identity metric is ``chi^n = n! i^(n^2) dz^(1..n) ^ dzbar^(1..n)``,
so positive (p,p)-forms carry the density ``i^(p^2)`` on their diagonal terms.
"""

from functools import lru_cache
from itertools import combinations
from math import comb, factorial

import numpy as np

from ..errors import DegreeOverflow, HypothesisViolated, MetricNotPositive

MAX_DIM = 6

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def i_power(k):
    """Exact value of i^k"""
    return _I_POWERS[k % 4]


def basis_density(k):
    """Coefficient i^(k^2) of a positive diagonal (k,k) basis element"""
    return i_power(k * k)


@lru_cache(maxsize=None)
def merge_indices(first, second):
    """Sorted union of two increasing tuples and the sign of the shuffle

    Returns ``(0, None)`` when the tuples share an index.
    """
    if set(first) & set(second):
        return 0, None
    inversions = sum(1 for a in first for b in second if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(first + second))


def sort_with_sign(indices):
    """Sort an index tuple, returning the permutation sign (0 on repetition)"""
    indices = tuple(indices)
    if len(set(indices)) != len(indices):
        return 0, None
    inversions = sum(1 for i in range(len(indices)) for j in range(i + 1, len(indices)) if indices[i] > indices[j])
    return (-1 if inversions % 2 else 1), tuple(sorted(indices))


class PPForm:
    """Constant coefficient (p,q)-form on C^n

    Parameters
    ----------

    dim : int
        Complex dimension n.
    bidegree : tuple of int
        (p, q).
    coeffs : dict, optional
        Canonical coefficients keyed by ``(I, J)`` increasing tuples.
    """

    __slots__ = ("dim", "bidegree", "coeffs")
    __array_ufunc__ = None

    def __init__(self, dim, bidegree, coeffs=None):
        p, q = bidegree
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside 1..{MAX_DIM}")
        if p > dim or q > dim or p < 0 or q < 0:
            raise DegreeOverflow(f"bidegree {bidegree} does not fit in dimension {dim}")
        self.dim = dim
        self.bidegree = (p, q)
        self.coeffs = {}
        for (I, J), c in (coeffs or {}).items():
            if len(I) != p or len(J) != q:
                raise ValueError(f"index pair {(I, J)} has wrong bidegree")
            if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
                raise ValueError(f"index pair {(I, J)} is not canonical, use PPForm.from_terms")
            if c != 0:
                self.coeffs[(tuple(I), tuple(J))] = complex(c)

    @classmethod
    def from_terms(cls, dim, bidegree, terms):
        """Build a form from ``((I, J), c)`` terms in any index order"""
        coeffs = {}
        for (I, J), c in terms:
            s1, I = sort_with_sign(I)
            s2, J = sort_with_sign(J)
            if s1 * s2 == 0:
                continue
            coeffs[(I, J)] = coeffs.get((I, J), 0.0) + s1 * s2 * c
        return cls(dim, bidegree, coeffs)

    @classmethod
    def zero(cls, dim, bidegree=(0, 0)):
        return cls(dim, bidegree)

    @classmethod
    def one(cls, dim):
        return cls(dim, (0, 0), {((), ()): 1.0})

    @classmethod
    def dz(cls, dim, i):
        return cls(dim, (1, 0), {((i,), ()): 1.0})

    @classmethod
    def dzbar(cls, dim, j):
        return cls(dim, (0, 1), {((), (j,)): 1.0})

    @classmethod
    def from_hermitian(cls, matrix):
        """Real (1,1)-form i sum a_jk dz^j ^ dzbar^k"""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
        n = matrix.shape[0]
        return cls(n, (1, 1), {((j,), (k,)): 1j * matrix[j, k] for j in range(n) for k in range(n)})

    def hermitian_matrix(self):
        """Inverse of ``from_hermitian`` for (1,1)-forms"""
        if self.bidegree != (1, 1):
            raise ValueError(f"bidegree {self.bidegree} is not (1, 1)")
        matrix = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for ((j,), (k,)), c in self.coeffs.items():
            matrix[j, k] = -1j * c
        return matrix

    @property
    def degree(self):
        return sum(self.bidegree)

    def _check_same_space(self, other):
        if self.dim != other.dim or self.bidegree != other.bidegree:
            raise ValueError(f"cannot add forms {self.dim}{self.bidegree} and {other.dim}{other.bidegree}")

    def __add__(self, other):
        self._check_same_space(other)
        coeffs = dict(self.coeffs)
        for key, c in other.coeffs.items():
            coeffs[key] = coeffs.get(key, 0.0) + c
        return PPForm(self.dim, self.bidegree, coeffs)

    def __neg__(self):
        return PPForm(self.dim, self.bidegree, {key: -c for key, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return PPForm(self.dim, self.bidegree, {key: scalar * c for key, c in self.coeffs.items()})

    __rmul__ = __mul__

    def wedge(self, other):
        """Exterior product, graded commutative with sign (-1)^(deg F deg G)"""
        if self.dim != other.dim:
            raise ValueError("forms live on different spaces")
        p = self.bidegree[0] + other.bidegree[0]
        q = self.bidegree[1] + other.bidegree[1]
        if p > self.dim or q > self.dim:
            raise DegreeOverflow(f"bidegree ({p}, {q}) exceeds ({self.dim}, {self.dim})")
        # dzbar^J moves across dz^K
        cross = -1 if (self.bidegree[1] * other.bidegree[0]) % 2 else 1
        coeffs = {}
        for (I, J), a in self.coeffs.items():
            for (K, L), b in other.coeffs.items():
                s1, IK = merge_indices(I, K)
                if s1 == 0:
                    continue
                s2, JL = merge_indices(J, L)
                if s2 == 0:
                    continue
                key = (IK, JL)
                coeffs[key] = coeffs.get(key, 0.0) + cross * s1 * s2 * a * b
        return PPForm(self.dim, (p, q), coeffs)

    def power(self, k):
        result = PPForm.one(self.dim)
        for _ in range(k):
            result = result.wedge(self)
        return result

    def conjugate(self):
        p, q = self.bidegree
        sign = -1 if (p * q) % 2 else 1
        return PPForm(self.dim, (q, p), {(J, I): sign * np.conj(c) for (I, J), c in self.coeffs.items()})

    def real_part(self):
        return 0.5 * (self + self.conjugate())

    def imag_part(self):
        return (-0.5j) * (self - self.conjugate())

    def is_real(self, tol=1e-12):
        if self.bidegree[0] != self.bidegree[1]:
            return False
        return (self - self.conjugate()).norm() <= tol * max(self.norm(), 1.0)

    def norm(self):
        """Largest coefficient modulus"""
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def allclose(self, other, atol=1e-12):
        return self.dim == other.dim and self.bidegree == other.bidegree and (self - other).norm() <= atol

    def coefficient(self, I, J):
        return self.coeffs.get((tuple(I), tuple(J)), 0.0j)

    def top_coefficient(self):
        n = self.dim
        if self.bidegree != (n, n):
            raise ValueError(f"bidegree {self.bidegree} is not the top degree ({n}, {n})")
        full = tuple(range(n))
        return self.coefficient(full, full)

    def to_dict(self):
        """JSON-like nested map, terms sorted by index pair"""
        return {
            "dim": self.dim,
            "bidegree": list(self.bidegree),
            "coeffs": [
                {"I": list(I), "J": list(J), "re": float(c.real), "im": float(c.imag)}
                for (I, J), c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_dict(cls, data):
        coeffs = {(tuple(t["I"]), tuple(t["J"])): complex(t["re"], t["im"]) for t in data["coeffs"]}
        return cls(data["dim"], tuple(data["bidegree"]), coeffs)

    def __eq__(self, other):
        return isinstance(other, PPForm) and self.allclose(other, atol=0.0)

    __hash__ = None

    def __repr__(self):
        return f"PPForm(dim={self.dim}, bidegree={self.bidegree}, terms={len(self.coeffs)})"

    def __str__(self):
        terms = [
            f"({c.real:+.4g}{c.imag:+.4g}j) dz{list(I)} dzbar{list(J)}" for (I, J), c in sorted(self.coeffs.items())
        ]
        return f"({self.bidegree[0]},{self.bidegree[1]})-form on C^{self.dim}: " + (" + ".join(terms) or "0")


def wedge(F, G):
    return F.wedge(G)


def as_form(x):
    """Accept a (1,1) PPForm or a Hermitian matrix"""
    return x if isinstance(x, PPForm) else PPForm.from_hermitian(x)


def complex_power(omega, chi, k):
    """Real and imaginary parts of (omega + i chi)^k

    The binomial expansion uses (i chi)^j = i^j chi^j with exact signs; omega and
    chi are real (1,1)-forms so all products commute.

    Returns
    -------

    tuple of PPForm
        (Re, Im), both (k, k)-forms.
    """
    omega, chi = as_form(omega), as_form(chi)
    n = omega.dim
    if not 0 <= k <= n:
        raise DegreeOverflow(f"power {k} exceeds dimension {n}")
    omega_powers = [PPForm.one(n)]
    chi_powers = [PPForm.one(n)]
    for _ in range(k):
        omega_powers.append(omega_powers[-1].wedge(omega))
        chi_powers.append(chi_powers[-1].wedge(chi))
    re = PPForm.zero(n, (k, k))
    im = PPForm.zero(n, (k, k))
    for j in range(k + 1):
        term = comb(k, j) * omega_powers[k - j].wedge(chi_powers[j])
        unit = i_power(j)
        if j % 2 == 0:
            re = re + unit.real * term
        else:
            im = im + unit.imag * term
    return re, im


def rotate(re, im, theta):
    """Real and imaginary parts of e^(-i theta) (re + i im)"""
    c, s = float(np.cos(theta)), float(np.sin(theta))
    return c * re + s * im, c * im - s * re


def volume_coefficient(chi):
    """Top coefficient of chi^n, n! i^(n^2) det(chi)"""
    chi = as_form(chi)
    matrix = chi.hermitian_matrix()
    eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))
    if eigenvalues[0] <= 0.0:
        raise MetricNotPositive(f"chi has smallest eigenvalue {eigenvalues[0]:.3e}")
    n = chi.dim
    return factorial(n) * basis_density(n) * float(np.prod(eigenvalues))


def pair_top(F, chi):
    """Ratio F / chi^n of two top-degree forms

    Returns a float when F is real, the complex ratio otherwise.
    """
    ratio = F.top_coefficient() / volume_coefficient(chi)
    if F.is_real():
        return float(ratio.real)
    return complex(ratio)


class SimplePositiveForm:
    """(i a_1 ^ conj a_1) ^ ... ^ (i a_q ^ conj a_q)

    Parameters
    ----------

    generators : array_like
        q x n complex matrix, one covector per row.
    """

    def __init__(self, generators):
        generators = np.atleast_2d(np.asarray(generators, dtype=np.complex128))
        self.generators = generators
        self.degree, self.dim = generators.shape

    def gram_determinant(self):
        if self.degree == 0:
            return 1.0
        return float(np.linalg.det(self.generators @ self.generators.conj().T).real)

    def is_degenerate(self, cutoff=1e-8):
        return self.gram_determinant() < cutoff

    def to_form(self):
        """Expanded (q,q)-form, coefficient i^(q^2) det(a_I) conj(det(a_J))"""
        q, n = self.degree, self.dim
        if q == 0:
            return PPForm.one(n)
        subsets = list(combinations(range(n), q))
        minors = {I: np.linalg.det(self.generators[:, list(I)]) for I in subsets}
        density = basis_density(q)
        return PPForm(n, (q, q), {(I, J): density * minors[I] * np.conj(minors[J]) for I in subsets for J in subsets})

    def to_form_by_wedge(self):
        result = PPForm.one(self.dim)
        for row in self.generators:
            result = result.wedge(PPForm.from_hermitian(np.outer(row, row.conj())))
        return result

    @classmethod
    def random(cls, rng, n, q, cutoff=1e-8, max_tries=100):
        """Complex Gaussian generators, rejected while the Gram determinant < cutoff"""
        for _ in range(max_tries):
            generators = rng.standard_normal((q, n)) + 1j * rng.standard_normal((q, n))
            form = cls(generators)
            if q == 0 or not form.is_degenerate(cutoff):
                return form
        raise HypothesisViolated(f"no nondegenerate simple form after {max_tries} draws")
