"""Diagonal-kernel spaces on the polydisc and their monomial submodules.

A diagonal kernel ``K(z, w) = sum_alpha a_alpha z^alpha conj(w)^alpha`` makes the
monomials an orthogonal basis with ``||z^alpha||^2 = 1 / a_alpha``.  Vectors of a
:class:`TruncatedModule` are stored in *orthonormal coordinates*: the coordinate
at ``alpha`` is the coefficient of ``z^alpha / ||z^alpha||``.  Helpers convert to
and from plain monomial coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ArgumentError,
    DomainError,
    NotInModuleError,
    TruncationTooSmallError,
    UnsupportedError,
)

MultiIndex = tuple[int, ...]

BASIS_ORDERING = "total degree ascending, then lexicographic descending (z1^2 before z1 z2 before z2^2)"


def as_multi_index(alpha: Iterable[int], m: int | None = None) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise ArgumentError(f"negative exponent in {alpha}")
    if m is not None and len(alpha) != m:
        raise ArgumentError(f"multi-index {alpha} has length {len(alpha)}, expected {m}")
    return alpha


def basis_key(alpha: MultiIndex):
    return (sum(alpha), tuple(-a for a in alpha))


def divides(gamma: MultiIndex, alpha: MultiIndex) -> bool:
    return all(g <= a for g, a in zip(gamma, alpha))


def multi_indices(m: int, max_degree: int, min_degree: int = 0) -> list[MultiIndex]:
    """All multi-indices of length ``m`` with ``min_degree <= |alpha| <= max_degree``, in basis order."""
    out = []
    for deg in range(min_degree, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(m), deg):
            alpha = [0] * m
            for j in combo:
                alpha[j] += 1
            out.append(tuple(alpha))
    return sorted(out, key=basis_key)


def rising_coefficient(k: int, lam: float) -> float:
    """``lam (lam+1) ... (lam+k-1) / k!``, the ``k``-th coefficient of ``(1-x)^(-lam)``."""
    c = 1.0
    for i in range(k):
        c *= (lam + i) / (i + 1)
    return c


@dataclass(frozen=True)
class DiagonalKernelSpec:
    """Product kernel ``prod_j (1 - z_j conj(w_j))^(-lambda_j)`` on the unit polydisc."""

    lambdas: tuple[float, ...]
    family: str = "power"

    def __post_init__(self):
        if len(self.lambdas) < 1:
            raise ArgumentError("need at least one variable")
        if any(not (math.isfinite(l) and l > 0) for l in self.lambdas):
            raise ArgumentError(f"kernel parameters must be positive, got {self.lambdas}")
        if self.family not in ("power", "hardy", "bergman"):
            raise ArgumentError(f"unknown kernel family {self.family!r}")

    @classmethod
    def power(cls, *lambdas: float) -> "DiagonalKernelSpec":
        return cls(tuple(float(l) for l in lambdas), "power")

    @classmethod
    def hardy(cls, m: int = 2) -> "DiagonalKernelSpec":
        return cls((1.0,) * m, "hardy")

    @classmethod
    def bergman(cls, m: int = 2) -> "DiagonalKernelSpec":
        return cls((2.0,) * m, "bergman")

    @property
    def m(self) -> int:
        return len(self.lambdas)

    def weight(self, alpha: Iterable[int]) -> float:
        alpha = as_multi_index(alpha, self.m)
        return math.prod(rising_coefficient(a, l) for a, l in zip(alpha, self.lambdas))

    def kernel(self, z, w) -> complex:
        """Closed-form kernel value ``K(z, w)``."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return complex(np.prod((1 - z * np.conj(w)) ** (-np.asarray(self.lambdas))))


def kernel_weight(spec: DiagonalKernelSpec, alpha: Iterable[int]) -> float:
    return spec.weight(alpha)


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal given by its minimal generators (an antichain under division).

    Generators are minimized on construction and kept in basis order; that order
    is the "generator-list order" used by :func:`kernel_decompose`.
    """

    m: int
    generators: tuple[MultiIndex, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ArgumentError("need at least one variable")
        gens = [as_multi_index(g, self.m) for g in self.generators]
        if not gens:
            raise ArgumentError("the zero ideal is not supported")
        object.__setattr__(self, "generators", tuple(minimize_antichain(gens)))

    @classmethod
    def from_generators(cls, generators: Iterable[Iterable[int]]) -> "MonomialIdeal":
        gens = [tuple(g) for g in generators]
        if not gens:
            raise ArgumentError("the zero ideal is not supported")
        return cls(len(gens[0]), tuple(gens))

    @classmethod
    def full(cls, m: int) -> "MonomialIdeal":
        return cls(m, ((0,) * m,))

    @classmethod
    def vanish_at_origin(cls, m: int) -> "MonomialIdeal":
        return cls(m, tuple(tuple(int(i == j) for i in range(m)) for j in range(m)))

    @classmethod
    def maximal_power(cls, m: int, k: int) -> "MonomialIdeal":
        return cls(m, tuple(multi_indices(m, k, k)))

    def contains(self, alpha: Iterable[int]) -> bool:
        alpha = as_multi_index(alpha, self.m)
        return any(divides(g, alpha) for g in self.generators)

    __contains__ = contains

    @property
    def max_degree(self) -> int:
        return max(sum(g) for g in self.generators)

    def vanishes_at(self, w) -> bool:
        """True if every generator vanishes at ``w`` (``w`` in the zero variety)."""
        w = np.asarray(w, dtype=complex)
        return all(any(g[j] > 0 and w[j] == 0 for j in range(self.m)) for g in self.generators)


def minimize_antichain(gens: Iterable[MultiIndex]) -> list[MultiIndex]:
    """Drop every exponent divisible by another one; return the rest in basis order."""
    uniq = sorted(set(gens), key=basis_key)
    keep: list[MultiIndex] = []
    for g in uniq:
        if not any(divides(h, g) for h in keep):
            keep.append(g)
    return keep


@dataclass(frozen=True)
class TruncatedModule:
    """Closure of a monomial ideal in a diagonal-kernel space, cut at total degree ``N``."""

    spec: DiagonalKernelSpec
    ideal: MonomialIdeal
    N: int
    basis: tuple[MultiIndex, ...] = field(repr=False)
    weights: np.ndarray = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def n(self) -> int:
        return len(self.basis)

    @cached_property
    def index(self) -> dict[MultiIndex, int]:
        return {alpha: i for i, alpha in enumerate(self.basis)}

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([sum(a) for a in self.basis], dtype=int)

    @cached_property
    def norms(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.weights)

    @property
    def norms_sq(self) -> np.ndarray:
        return 1.0 / self.weights

    @cached_property
    def exponents(self) -> np.ndarray:
        return np.array(self.basis, dtype=int).reshape(self.n, self.m)

    def count_below(self, degree: int) -> int:
        """Number of basis elements of total degree ``<= degree`` (a prefix of the basis)."""
        return int(np.count_nonzero(self.degrees <= degree))

    def position(self, alpha: Iterable[int]) -> int:
        alpha = as_multi_index(alpha, self.m)
        try:
            return self.index[alpha]
        except KeyError:
            raise NotInModuleError(f"z^{alpha} is not in the truncated module") from None

    def monomial_norm_sq(self, alpha: Iterable[int]) -> float:
        return float(self.norms_sq[self.position(alpha)])

    def coords(self, poly: Mapping[Iterable[int], complex]) -> np.ndarray:
        """Orthonormal coordinates of ``sum c_alpha z^alpha``."""
        x = np.zeros(self.n, dtype=complex)
        for alpha, c in dict(poly).items():
            i = self.position(alpha)
            x[i] += c * self.norms[i]
        return x

    def monomial_coefficients(self, x: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`coords`: monomial coefficients in basis order."""
        return np.asarray(x) / self.norms

    def unit_vector(self, alpha: Iterable[int]) -> np.ndarray:
        x = np.zeros(self.n, dtype=complex)
        x[self.position(alpha)] = 1.0
        return x

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        """``<x, y>``, linear in ``x``."""
        return complex(np.vdot(y, x))

    def evaluate(self, x: np.ndarray, z) -> complex:
        """Value at ``z`` of the function with orthonormal coordinates ``x``."""
        z = np.asarray(z, dtype=complex)
        mono = np.prod(z[None, :] ** self.exponents, axis=1)
        return complex(np.sum(self.monomial_coefficients(x) * mono))

    def conj_powers(self, w) -> np.ndarray:
        """``conj(w)^alpha`` over the basis."""
        w = np.asarray(w, dtype=complex)
        return np.prod(np.conj(w)[None, :] ** self.exponents, axis=1)


def monomial_norm_sq(module: TruncatedModule, alpha: Iterable[int]) -> float:
    return module.monomial_norm_sq(alpha)


def build_truncated_module(spec: DiagonalKernelSpec, ideal: MonomialIdeal | None, N: int) -> TruncatedModule:
    """Finite model of the closure of ``ideal`` in the space of ``spec``.

    ``ideal=None`` means the whole space.  The basis is every exponent of total
    degree ``<= N`` lying in the ideal.
    """
    if ideal is None:
        ideal = MonomialIdeal.full(spec.m)
    if ideal.m != spec.m:
        raise ArgumentError(f"ideal has {ideal.m} variables, kernel has {spec.m}")
    N = int(N)
    if N < ideal.max_degree:
        raise TruncationTooSmallError(
            f"truncation N={N} below largest generator degree {ideal.max_degree}"
        )
    basis = tuple(a for a in multi_indices(spec.m, N) if ideal.contains(a))
    weights = np.array([spec.weight(a) for a in basis], dtype=float)
    weights.setflags(write=False)
    return TruncatedModule(spec, ideal, N, basis, weights)


def check_point(w, m: int) -> np.ndarray:
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape != (m,):
        raise ArgumentError(f"point must lie in C^{m}")
    if not np.all(np.isfinite(w)):
        raise ArgumentError("point has non-finite coordinates")
    return w


@dataclass(frozen=True)
class KernelVector:
    """Truncated ``K(., w)``; ``coefficients`` are monomial coefficients ``a_alpha conj(w)^alpha``."""

    module: TruncatedModule = field(repr=False)
    point: np.ndarray
    coefficients: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        """Orthonormal coordinates."""
        return self.coefficients * self.module.norms

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def kernel_vector(module: TruncatedModule, w) -> KernelVector:
    w = check_point(w, module.m)
    if np.any(np.abs(w) >= 1):
        raise DomainError(f"point {w} is outside the open polydisc")
    coeffs = module.weights * module.conj_powers(w)
    return KernelVector(module, w, coeffs)


@dataclass(frozen=True)
class KernelDecomposition:
    """``K_w = sum_i factors[i] * parts[i]`` with ``factors[i] = conj(w)^{gamma_i}``."""

    point: np.ndarray
    generators: tuple[MultiIndex, ...]
    factors: np.ndarray
    parts: tuple[KernelVector, ...]

    def recombine(self) -> np.ndarray:
        """Monomial coefficients of ``sum_i factors[i] parts[i]``."""
        return sum(f * p.coefficients for f, p in zip(self.factors, self.parts))


def assign_generators(module: TruncatedModule) -> np.ndarray:
    """For each basis exponent, the index of the first generator dividing it."""
    gens = module.ideal.generators
    out = np.empty(module.n, dtype=int)
    for k, alpha in enumerate(module.basis):
        out[k] = next(i for i, g in enumerate(gens) if divides(g, alpha))
    return out


def kernel_decompose(module: TruncatedModule, w) -> KernelDecomposition:
    """Split the truncated kernel along the minimal monomial generators.

    Each basis exponent ``alpha`` is assigned to the first generator ``gamma_i``
    (generator-list order) dividing it; ``K^(i)`` then has coefficient
    ``a_alpha conj(w)^(alpha - gamma_i)`` at ``alpha``.  The scalar factor is
    ``conj(w)^gamma_i``, the conjugate of the generator evaluated at ``w``.
    """
    if not isinstance(module.ideal, MonomialIdeal):
        raise UnsupportedError("kernel decomposition needs a monomial ideal")
    w = check_point(w, module.m)
    if np.any(np.abs(w) >= 1):
        raise DomainError(f"point {w} is outside the open polydisc")
    gens = module.ideal.generators
    owner = assign_generators(module)
    wbar = np.conj(w)
    parts = []
    for i, g in enumerate(gens):
        shifted = module.exponents - np.asarray(g)[None, :]
        coeffs = np.where(owner == i, module.weights * np.prod(wbar[None, :] ** np.maximum(shifted, 0), axis=1), 0)
        parts.append(KernelVector(module, w, coeffs.astype(complex)))
    factors = np.array([np.prod(wbar ** np.asarray(g)) for g in gens], dtype=complex)
    return KernelDecomposition(w, gens, factors, tuple(parts))


def gram_matrix(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """``G[p, q] = <v_p, v_q>`` for orthonormal-coordinate vectors."""
    X = np.column_stack(vectors)
    return X.T @ X.conj()
