"""Local algebra of monomial and unit-factored ideals.

A generator is a monomial times an optional *unit witness*: a polynomial that
does not vanish at the base point.  Locally the witness is invertible, so the
stalk at ``w0`` is generated by the monomial parts.  With ``w0`` fixed, a
coordinate ``z_j`` with ``w0_j != 0`` is again a unit, so only the exponents
on the vanishing coordinates of ``w0`` survive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, InvalidWitnessError, UnsupportedError
from .linop import DEFAULT_EPS, joint_kernel
from .poly import Polynomial
from .rkhs import (
    MonomialIdeal,
    MultiIndex,
    TruncatedModule,
    as_multi_index,
    basis_key,
    check_point,
    minimize_antichain,
    multi_indices,
)

WITNESS_TOL = 1e-8


@dataclass(frozen=True)
class FactoredGenerator:
    """``z^monomial * unit``; ``unit=None`` means the constant 1."""

    monomial: MultiIndex
    unit: Polynomial | None = None

    def __post_init__(self):
        object.__setattr__(self, "monomial", as_multi_index(self.monomial))
        if self.unit is not None and self.unit.m != len(self.monomial):
            raise ArgumentError("unit witness has the wrong number of variables")

    @property
    def m(self) -> int:
        return len(self.monomial)

    def as_polynomial(self) -> Polynomial:
        mono = Polynomial.monomial(self.monomial)
        return mono if self.unit is None else mono * self.unit


def as_generators(ideal) -> list[FactoredGenerator]:
    if isinstance(ideal, MonomialIdeal):
        return [FactoredGenerator(g) for g in ideal.generators]
    gens = []
    for g in ideal:
        gens.append(g if isinstance(g, FactoredGenerator) else FactoredGenerator(tuple(g)))
    if not gens:
        raise ArgumentError("empty generator list")
    return gens


def monomial_closure(ideal) -> MonomialIdeal:
    """Monomial ideal whose closure the module is, once unit witnesses are dropped.

    Witnesses are assumed zero-free on the open polydisc; such polynomials are
    cyclic in the diagonal-kernel spaces handled here, so dropping them does not
    change the closure.
    """
    gens = as_generators(ideal)
    return MonomialIdeal(gens[0].m, tuple(g.monomial for g in gens))


@dataclass(frozen=True)
class StalkGenerators:
    point: np.ndarray
    generators: tuple[MultiIndex, ...]

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def is_unit(self) -> bool:
        return self.generators == ((0,) * len(self.point),)


def minimal_generators(ideal, w0) -> StalkGenerators:
    gens = as_generators(ideal)
    m = gens[0].m
    if any(g.m != m for g in gens):
        raise ArgumentError("generators disagree on the number of variables")
    w0 = check_point(w0, m)
    vanishing = np.abs(w0) == 0
    local = []
    for g in gens:
        if g.unit is not None:
            val = abs(g.unit(w0))
            if val <= WITNESS_TOL:
                raise InvalidWitnessError(f"unit witness for z^{g.monomial} has |value| = {val:.3e} at {w0}")
        local.append(tuple(a if vanishing[j] else 0 for j, a in enumerate(g.monomial)))
    return StalkGenerators(w0, tuple(minimize_antichain(local)))


@dataclass(frozen=True)
class CharacteristicSpace:
    """Span of monomials ``z^beta`` with ``|beta| <= cap``; the zero polynomial is implicit."""

    point: np.ndarray
    cap: int
    basis: tuple[MultiIndex, ...]

    @property
    def exponents(self) -> frozenset:
        return frozenset(self.basis)

    def __contains__(self, beta) -> bool:
        return tuple(beta) in self.exponents


def characteristic_space(ideal: MonomialIdeal, w0=None, cap: int = 2) -> CharacteristicSpace:
    """Polynomials ``q`` with ``q(D) f|_0 = 0`` for every ``f`` in the ideal, up to degree ``cap``.

    At the origin ``d^beta z^alpha|_0 = alpha! delta_{alpha beta}``, so ``z^beta``
    qualifies exactly when ``beta`` is outside the exponent set.
    """
    if w0 is None:
        w0 = np.zeros(ideal.m)
    w0 = check_point(w0, ideal.m)
    if np.any(w0 != 0):
        raise UnsupportedError("characteristic spaces are only computed at the origin")
    if cap < 0:
        raise ArgumentError("cap must be non-negative")
    basis = tuple(b for b in multi_indices(ideal.m, cap) if not ideal.contains(b))
    return CharacteristicSpace(w0, cap, basis)


def tilde_space(V: CharacteristicSpace, cap: int | None = None) -> CharacteristicSpace:
    """Polynomials all of whose first partials lie in ``V``.

    A zero partial always qualifies, so constants are always included.
    """
    if cap is None:
        cap = V.cap + 1
    m = len(V.point)
    exps = V.exponents
    out = []
    for beta in multi_indices(m, cap):
        ok = True
        for i in range(m):
            if beta[i] > 0:
                lower = list(beta)
                lower[i] -= 1
                if tuple(lower) not in exps:
                    ok = False
                    break
        if ok:
            out.append(beta)
    return CharacteristicSpace(V.point, cap, tuple(sorted(out, key=basis_key)))


@dataclass(frozen=True)
class GleasonReport:
    point: np.ndarray
    d_stalk: int
    d_kernel: int
    stalk_generators: tuple[MultiIndex, ...]
    singular_gap: tuple[float, float]

    @property
    def equal(self) -> bool:
        return self.d_stalk == self.d_kernel

    @property
    def anomaly(self) -> bool:
        # closures of polynomial ideals always satisfy equality
        return not self.equal


def gleason_report(module: TruncatedModule, ideal, w0, eps: float = DEFAULT_EPS) -> GleasonReport:
    stalk = minimal_generators(ideal, w0)
    jk = joint_kernel(module, w0, eps)
    return GleasonReport(stalk.point, stalk.d, jk.dim, stalk.generators, jk.gap)


def multiply_by_unit(generators: Sequence[FactoredGenerator], index: int, unit: Polynomial) -> list[FactoredGenerator]:
    """Return a copy of ``generators`` with generator ``index`` multiplied by ``unit``."""
    out = list(generators)
    g = out[index]
    out[index] = FactoredGenerator(g.monomial, unit if g.unit is None else g.unit * unit)
    return out


def parse_generators(items: Iterable, m: int | None = None) -> list[FactoredGenerator]:
    """Accept ``[[1, 0], ...]`` or ``[{"monomial": [1, 0], "unit": "1+z1"}, ...]``."""
    out = []
    for item in items:
        if isinstance(item, FactoredGenerator):
            out.append(item)
            continue
        if isinstance(item, dict):
            mono = as_multi_index(item["monomial"], m)
            unit = item.get("unit")
            if isinstance(unit, str):
                unit = Polynomial.parse(unit, len(mono))
            elif unit is not None and not isinstance(unit, Polynomial):
                unit = Polynomial.from_terms(len(mono), unit)
            out.append(FactoredGenerator(mono, unit))
        else:
            out.append(FactoredGenerator(as_multi_index(item, m)))
    return out
