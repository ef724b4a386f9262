"""Boundary rank sampling for matrices of polynomial multipliers.

A sampled check is one-sided.  A rank jump comes with witness points and is
conclusive at the tolerance.  A single observed rank only means that no jump
was seen at the sampling density.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import ArgumentError, UnsupportedError
from .poly import Polynomial

HALTON_SEED = 20240601
SEPARATION = 1e-6


@dataclass(frozen=True)
class Domain:
    kind: str
    m: int

    def __post_init__(self):
        if self.kind not in ("polydisc", "ball"):
            raise UnsupportedError(f"unsupported domain {self.kind!r}")
        if self.m < 1:
            raise ArgumentError("domain dimension must be positive")

    @classmethod
    def polydisc(cls, m: int = 2) -> "Domain":
        return cls("polydisc", m)

    @classmethod
    def ball(cls, m: int = 2) -> "Domain":
        return cls("ball", m)

    @property
    def rests_on_remark(self) -> bool:
        # rank criterion is proved for strictly convex smooth domains; the
        # polydisc case is the product-domain extension
        return self.kind == "polydisc"


@dataclass(frozen=True)
class PolyMatrix:
    """``p x q`` matrix of polynomials in ``m`` variables."""

    entries: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if not rows or not rows[0]:
            raise ArgumentError("empty polynomial matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ArgumentError("ragged polynomial matrix")
        ms = {e.m for r in rows for e in r}
        if len(ms) != 1:
            raise ArgumentError("entries disagree on the number of variables")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_nested(cls, rows: Sequence[Sequence], m: int) -> "PolyMatrix":
        """Entries may be :class:`Polynomial`, expression strings or term lists."""

        def conv(e):
            if isinstance(e, Polynomial):
                return e
            if isinstance(e, str):
                return Polynomial.parse(e, m)
            if isinstance(e, (int, float, complex)):
                return Polynomial.constant(m, e)
            return Polynomial.from_terms(m, e)

        return cls(tuple(tuple(conv(e) for e in row) for row in rows))

    @property
    def m(self) -> int:
        return self.entries[0][0].m

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def __call__(self, z) -> np.ndarray:
        return np.array([[e(z) for e in row] for row in self.entries], dtype=complex)

    def transform(self, left: np.ndarray, right: np.ndarray) -> "PolyMatrix":
        """``left @ A @ right`` for constant matrices."""
        p, q = self.shape
        rows = []
        for a in range(left.shape[0]):
            row = []
            for b in range(right.shape[1]):
                acc: dict = {}
                for i in range(p):
                    for j in range(q):
                        c = left[a, i] * right[j, b]
                        for alpha, coef in self.entries[i][j].terms:
                            acc[alpha] = acc.get(alpha, 0) + c * coef
                row.append(Polynomial.from_dict(self.m, acc))
            rows.append(tuple(row))
        return PolyMatrix(tuple(rows))


def _angles(count: int) -> np.ndarray:
    return 2 * np.pi * np.arange(count) / count


def _halton_disc(count: int, dim: int) -> np.ndarray:
    """``count`` points of the closed unit disc to the power ``dim`` (area-uniform, nested in count)."""
    if count == 0 or dim == 0:
        return np.zeros((count, dim), dtype=complex)
    u = qmc.Halton(d=2 * dim, scramble=True, seed=HALTON_SEED).random(count)
    r = np.sqrt(u[:, :dim])
    return r * np.exp(2j * np.pi * u[:, dim:])


def boundary_samples(domain: Domain, density: int) -> np.ndarray:
    """Deterministic sample of the topological boundary, shape ``(count, m)``.

    Polydisc: for each stratum ``|z_j| = 1`` the circle coordinate runs over
    ``density`` equally spaced angles, and the other coordinates over the
    origin, the torus and Halton points of the closed polydisc.  Ball:
    Hopf-type grid (exact for ``m = 2``) or normalized Halton Gaussians.
    Doubling ``density`` gives a superset of the previous sample.
    """
    if density < 8:
        raise ArgumentError("density must be at least 8")
    m = domain.m
    if domain.kind == "polydisc":
        circle = np.exp(1j * _angles(density))
        others = [np.zeros((1, m - 1), dtype=complex)]
        if m > 1:
            torus = np.exp(1j * _angles(density))[:, None] * np.ones((1, m - 1))
            others += [torus, _halton_disc(density, m - 1)]
        rest = np.vstack(others)
        pts = []
        for j in range(m):
            for c in circle:
                block = np.insert(rest, j, c, axis=1)
                pts.append(block)
        return np.vstack(pts)
    if m == 1:
        return np.exp(1j * _angles(density))[:, None]
    if m == 2:
        eta = 0.5 * np.pi * np.arange(density + 1) / density
        phi = _angles(density)
        pts = [
            [np.cos(e) * np.exp(1j * a), np.sin(e) * np.exp(1j * b)]
            for e in eta
            for a in phi
            for b in phi
        ]
        return np.array(pts, dtype=complex)
    u = qmc.Halton(d=2 * m, scramble=True, seed=HALTON_SEED).random(density**2)
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    z = g[:, :m] + 1j * g[:, m:]
    axes = np.eye(m, dtype=complex)
    z = np.vstack([axes, z])
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass(frozen=True)
class PrivilegeReport:
    sample_count: int
    ranks: dict
    witnesses: dict
    verdict: str
    eps: float
    min_nonzero_singular: float
    ambiguous: int
    domain: Domain
    note: str = field(default="")

    @property
    def observed_ranks(self) -> list[int]:
        return sorted(self.ranks)


def privilege_verdict(A: PolyMatrix, domain: Domain, density: int = 16, eps: float = 1e-9) -> PrivilegeReport:
    """Rank of ``A`` over the boundary sample; verdict by rank constancy.

    Ranks use a global relative threshold ``eps * max sigma`` over all samples.
    Samples with a singular value in ``(eps, SEPARATION] * max sigma`` are
    ambiguous; with fewer than two unambiguous ranks they make the verdict
    "inconclusive".
    """
    if A.m != domain.m:
        raise ArgumentError(f"matrix has {A.m} variables, domain has {domain.m}")
    pts = boundary_samples(domain, density)
    svals = [np.linalg.svd(A(z), compute_uv=False) for z in pts]
    scale = max(float(s.max()) for s in svals)
    thr = eps * scale
    ranks: Counter = Counter()
    witnesses: dict = {}
    ambiguous = 0
    min_nonzero = np.inf
    for z, s in zip(pts, svals):
        nz = s[s > thr]
        if nz.size:
            min_nonzero = min(min_nonzero, float(nz.min()))
        if np.any((s > thr) & (s <= SEPARATION * scale)):
            ambiguous += 1
            continue
        r = int(nz.size)
        ranks[r] += 1
        witnesses.setdefault(r, z)
    if len(ranks) >= 2:
        verdict, note = "not-privileged", "rank jump observed on the boundary sample"
    elif ambiguous:
        verdict, note = "inconclusive", "singular values too close to the rank threshold"
    else:
        verdict, note = "privileged", f"no rank jump detected at density {density}"
    if domain.rests_on_remark:
        note += "; polydisc mode relies on the product-domain extension of the rank criterion"
    return PrivilegeReport(len(pts), dict(sorted(ranks.items())), dict(sorted(witnesses.items())), verdict, eps,
                           float(min_nonzero) if np.isfinite(min_nonzero) else 0.0, ambiguous, domain, note)
