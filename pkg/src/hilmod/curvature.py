"""Curvature coefficient matrices, the (n, k) line-bundle curvature and inequivalence screening."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .frame import MetricJet, frame_series, metric_jet, normalize_jet
from .linop import DEFAULT_EPS, STARVATION_TOL, joint_kernel
from .rkhs import (
    DiagonalKernelSpec,
    MonomialIdeal,
    TruncatedModule,
    build_truncated_module,
    check_point,
    kernel_vector,
)
from .stalk import minimal_generators

JET = "jet"
LINE_BUNDLE = "line-bundle-sign"
CONVENTIONS = (JET, LINE_BUNDLE)
DEFAULT_STEP = 1e-3


class NonCanonicalWarning(UserWarning):
    """Joint-kernel dimension exceeds the stalk generator count at the base point."""


@dataclass(frozen=True)
class CurvatureTensor:
    """``B[i, j]`` is the ``d x d`` coefficient of ``w_i conj(w_j)`` (0-based ``i, j``).

    ``convention="jet"`` stores the normalized metric coefficients verbatim;
    ``"line-bundle-sign"`` stores ``-(B - dbar_j h . d_i h)``, which for a line
    bundle is ``-d dbar log h`` at the base point.
    """

    point: np.ndarray
    B: np.ndarray
    convention: str = JET
    canonical: bool = True
    normal_frame: bool = True
    jet: MetricJet | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ArgumentError(f"unknown convention {self.convention!r}")
        B = np.asarray(self.B, dtype=complex)
        if B.ndim != 4 or B.shape[0] != B.shape[1] or B.shape[2] != B.shape[3]:
            raise ArgumentError("curvature array must have shape (m, m, d, d)")
        object.__setattr__(self, "B", B)

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def d(self) -> int:
        return self.B.shape[2]

    def block(self, i: int, j: int) -> np.ndarray:
        """Coefficient matrix of ``w_i conj(w_j)`` with 1-based ``i, j``."""
        return self.B[i - 1, j - 1]

    def hermitian_defect(self) -> float:
        return float(max(np.abs(self.B[i, j].conj().T - self.B[j, i]).max() for i in range(self.m) for j in range(self.m)))

    def conjugate(self, U: np.ndarray) -> "CurvatureTensor":
        """``U B U^*`` blockwise."""
        B = np.einsum("pa,ijab,qb->ijpq", U, self.B, U.conj())
        return CurvatureTensor(self.point, B, self.convention, self.canonical, self.normal_frame)

    def to_convention(self, convention: str) -> "CurvatureTensor":
        if convention == self.convention:
            return self
        if self.jet is None:
            if not self.normal_frame:
                raise ArgumentError("switching conventions needs the first-order jet")
            return CurvatureTensor(self.point, -self.B, convention, self.canonical, self.normal_frame)
        return tensor_from_jet(self.jet, convention, self.canonical)


def tensor_from_jet(jet: MetricJet, convention: str = JET, canonical: bool = True) -> CurvatureTensor:
    if not jet.normalized:
        jet = normalize_jet(jet)
    normal = jet.first_order_size() <= 1e-12
    if convention == JET:
        B = jet.mixed.copy()
    elif convention == LINE_BUNDLE:
        m = jet.m
        B = np.empty_like(jet.mixed)
        for i in range(m):
            for j in range(m):
                B[i, j] = -(jet.mixed[i, j] - jet.antiholomorphic[j] @ jet.holomorphic[i])
    else:
        raise ArgumentError(f"unknown convention {convention!r}")
    return CurvatureTensor(jet.point, B, convention, canonical, normal, jet)


def curvature_at(
    module: TruncatedModule,
    w0,
    eps: float = DEFAULT_EPS,
    convention: str = JET,
    ideal=None,
    starvation_tol: float = STARVATION_TOL,
) -> CurvatureTensor:
    """Curvature of the frame bundle at ``w0`` from the normalized second-order jet.

    ``ideal`` (defaults to the module's monomial ideal) is used to check that
    the joint-kernel dimension equals the stalk generator count; otherwise a
    :class:`NonCanonicalWarning` is emitted and the result is flagged.
    """
    w0 = check_point(w0, module.m)
    stalk = minimal_generators(module.ideal if ideal is None else ideal, w0)
    jk = joint_kernel(module, w0, eps, starvation_tol)
    canonical = jk.dim == stalk.d
    if not canonical:
        warnings.warn(
            f"joint kernel dimension {jk.dim} exceeds stalk generator count {stalk.d} at {w0}",
            NonCanonicalWarning,
            stacklevel=2,
        )
    frame = frame_series(module, w0, 2, eps, starvation_tol)
    jet = normalize_jet(metric_jet(frame))
    return tensor_from_jet(jet, convention, canonical)


def lambda_mu_oracle(lam: float, mu: float) -> np.ndarray:
    """Closed-form curvature matrices of the vanish-at-origin (lambda, mu) module at 0."""
    s = lam + mu
    off = (lam * mu / s) ** 2 / np.sqrt(lam * mu)
    B = np.zeros((2, 2, 2, 2))
    B[0, 0] = np.diag([(lam + 1) / 2, lam * mu**2 / s**2])
    B[1, 1] = np.diag([lam**2 * mu / s**2, (mu + 1) / 2])
    B[0, 1] = [[0, off], [0, 0]]
    B[1, 0] = [[0, 0], [off, 0]]
    return B


# --- (n, k) examples -----------------------------------------------------------


def _check_nk(n: int, k: int):
    if not (isinstance(n, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise ArgumentError("n and k must be integers")
    if not 0 < k < n:
        raise ArgumentError(f"need 0 < k < n, got n={n}, k={k}")


def nk_ideal(n: int, k: int) -> MonomialIdeal:
    _check_nk(n, k)
    return MonomialIdeal(2, ((n, 0), (k, n - k)))


def nk_module(n: int, k: int, N: int | None = None) -> TruncatedModule:
    return build_truncated_module(DiagonalKernelSpec.hardy(2), nk_ideal(n, k), n + 2 if N is None else N)


@dataclass(frozen=True)
class NKSection:
    """``s(theta) = z1^n + theta^(n-k) z1^k z2^(n-k)`` in the Hardy space."""

    n: int
    k: int
    theta: complex

    def __post_init__(self):
        _check_nk(self.n, self.k)

    @property
    def terms(self) -> dict:
        return {(self.n, 0): 1.0, (self.k, self.n - self.k): complex(self.theta) ** (self.n - self.k)}

    def vector(self, module: TruncatedModule) -> np.ndarray:
        return module.coords(self.terms)

    def norm_sq(self, module: TruncatedModule | None = None) -> float:
        if module is None:
            module = nk_module(self.n, self.k)
        x = self.vector(module)
        return float(module.inner(x, x).real)

    def closed_norm_sq(self) -> float:
        return 1.0 + abs(self.theta) ** (2 * (self.n - self.k))


def nk_curvature_closed(n: int, k: int, theta: complex) -> float:
    _check_nk(n, k)
    p = n - k
    r2 = abs(theta) ** 2
    return -(p**2) * r2 ** (p - 1) / (1 + r2**p) ** 2


def nk_curvature_numeric(n: int, k: int, theta: complex, h: float = DEFAULT_STEP) -> float:
    """``-d_theta d_thetabar log ||s(theta)||^2`` by a 9-point finite-difference Laplacian.

    Uses the equal-weight stencil ``[[1, 1, 1], [1, -8, 1], [1, 1, 1]] / (3 h^2)``
    for the Laplacian in ``(Re theta, Im theta)``; ``d dbar = Laplacian / 4``.
    """
    _check_nk(n, k)
    if not 0 < h <= 0.1:
        raise ArgumentError("step h must lie in (0, 0.1]")
    module = nk_module(n, k)
    theta = complex(theta)

    def f(dx, dy):
        return np.log(NKSection(n, k, theta + complex(dx, dy)).norm_sq(module))

    ring = sum(f(dx * h, dy * h) for dx, dy in itertools.product((-1, 0, 1), repeat=2) if (dx, dy) != (0, 0))
    lap = (ring - 8 * f(0, 0)) / (3 * h * h)
    return -lap / 4


def nk_curvature_tensor(n: int, k: int, theta: complex, numeric: bool = False, h: float = DEFAULT_STEP) -> CurvatureTensor:
    """Scalar line-bundle curvature packed as a 1 x 1 x 1 x 1 tensor."""
    val = nk_curvature_numeric(n, k, theta, h) if numeric else nk_curvature_closed(n, k, theta)
    return CurvatureTensor(np.array([complex(theta)]), np.full((1, 1, 1, 1), val, dtype=complex), LINE_BUNDLE)


def richardson_zero(ts, values) -> np.ndarray:
    """Polynomial extrapolation to ``t = 0`` through ``(ts[i], values[i])`` (Neville); nodes may be complex."""
    ts = [complex(t) for t in ts]
    table = [np.asarray(v, dtype=complex) for v in values]
    n = len(ts)
    for level in range(1, n):
        table = [
            (ts[i + level] * table[i] - ts[i] * table[i + 1]) / (ts[i + level] - ts[i])
            for i in range(n - level)
        ]
    return table[0]


def section_limit(module: TruncatedModule, n: int, theta: complex, points=None, ts=(0.1, 0.05, 0.025)) -> np.ndarray:
    """Limit of ``K(., w) / conj(w1)^n`` as ``w -> 0`` along ``conj(w2) / conj(w1) = theta``.

    Returns monomial coefficients over ``module.basis``.  With ``N <= n + len(ts) - 1``
    each coordinate is a polynomial of degree ``< len(ts)`` in ``t`` and the
    extrapolation is exact.
    """
    theta = complex(theta)
    if points is None:
        points = [t * np.array([1.0, np.conj(theta)]) for t in ts]
    pts = [check_point(p, 2) for p in points]
    nodes = []
    for p in pts:
        if p[0] == 0:
            raise ArgumentError("points must have w1 != 0")
        ratio = np.conj(p[1]) / np.conj(p[0])
        if abs(ratio - theta) > 1e-12 * max(1.0, abs(theta)):
            raise ArgumentError(f"point {p} violates conj(w2)/conj(w1) = {theta}")
        nodes.append(np.conj(p[0]))
    # along the ray each coefficient is a polynomial in s = conj(w1)
    values = [kernel_vector(module, p).coefficients / s**n for p, s in zip(pts, nodes)]
    return richardson_zero(nodes, values)


# --- inequivalence screening -------------------------------------------------------


@dataclass(frozen=True)
class CurvatureComparison:
    verdict: str
    invariant: str | None = None
    values: tuple | None = None
    exact: bool = False
    unitary: np.ndarray | None = field(default=None, repr=False)

    @property
    def distinguished(self) -> bool:
        return self.verdict == "distinguished"


def _letters(T: CurvatureTensor) -> list[tuple[str, np.ndarray]]:
    return [(f"B{i + 1}{j + 1}", T.B[i, j]) for i in range(T.m) for j in range(T.m)]


def _hermitian_parts(T: CurvatureTensor) -> list[tuple[str, np.ndarray]]:
    out = []
    for i in range(T.m):
        for j in range(i, T.m):
            out.append((f"eig(B{i + 1}{j + 1}+B{j + 1}{i + 1})", T.B[i, j] + T.B[j, i]))
            if i != j:
                out.append((f"eig(i(B{i + 1}{j + 1}-B{j + 1}{i + 1}))", 1j * (T.B[i, j] - T.B[j, i])))
    return out


def conjugation_invariants(T: CurvatureTensor, max_length: int = 3) -> list[tuple[str, np.ndarray]]:
    """Spectra of Hermitian combinations and traces of words of length ``<= max_length``."""
    inv = [(name, np.linalg.eigvalsh((H + H.conj().T) / 2)) for name, H in _hermitian_parts(T)]
    letters = _letters(T)
    for length in range(1, max_length + 1):
        for word in itertools.product(letters, repeat=length):
            prod = np.eye(T.d, dtype=complex)
            for _, A in word:
                prod = prod @ A
            inv.append(("tr(" + " ".join(n for n, _ in word) + ")", np.array([np.trace(prod)])))
    return inv


def _generic_hermitian(T: CurvatureTensor) -> np.ndarray:
    parts = [H for _, H in _hermitian_parts(T)]
    coeffs = np.sqrt([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37][: len(parts)] or [2])
    if len(parts) > len(coeffs):
        coeffs = np.sqrt(np.arange(2, len(parts) + 2))
    H = sum(c * P for c, P in zip(coeffs, parts))
    return (H + H.conj().T) / 2


def _phase_match(C1: list[np.ndarray], C2: list[np.ndarray], tol: float) -> np.ndarray | None:
    """Diagonal unitary ``phi`` with ``C2 = phi C1 phi^*`` for every pair, if one exists."""
    d = C1[0].shape[0]
    phi = np.full(d, np.nan, dtype=complex)
    for start in range(d):
        if not np.isnan(phi[start]):
            continue
        phi[start] = 1.0
        stack = [start]
        while stack:
            p = stack.pop()
            for q in range(d):
                if not np.isnan(phi[q]):
                    continue
                for A, B in zip(C1, C2):
                    for a, b, forward in ((A[p, q], B[p, q], True), (A[q, p], B[q, p], False)):
                        if abs(a) > tol and abs(b) > tol:
                            r = b / a
                            phi[q] = np.conj(r / phi[p]) if forward else r * phi[p]
                            phi[q] /= abs(phi[q])
                            break
                    if not np.isnan(phi[q]):
                        stack.append(q)
                        break
    D = np.diag(phi)
    for A, B in zip(C1, C2):
        if np.abs(D @ A @ D.conj().T - B).max() > tol:
            return None
    return phi


def compare_curvature(T1: CurvatureTensor, T2: CurvatureTensor, tol: float = 1e-8) -> CurvatureComparison:
    """Screen two curvature tensors for simultaneous unitary inequivalence.

    "distinguished" is conclusive.  "not-distinguished" is an equivalence proof
    only when ``exact`` is set: that happens when a generic Hermitian combination
    has simple spectrum (or every block is scalar), in which case a unitary
    witness ``U`` with ``U B1 U^* = B2`` is returned; it always applies for
    ``d <= 2``.
    """
    if T1.B.shape != T2.B.shape:
        raise ArgumentError(f"shape mismatch {T1.B.shape} vs {T2.B.shape}")
    if T1.convention != T2.convention:
        raise ArgumentError("tensors use different sign conventions")
    for (name, a), (_, b) in zip(conjugation_invariants(T1), conjugation_invariants(T2)):
        if np.any(np.abs(a - b) > tol * np.maximum(1.0, np.abs(a))):
            return CurvatureComparison("distinguished", name, (a.tolist(), b.tolist()), True)

    d = T1.d
    H1, H2 = _generic_hermitian(T1), _generic_hermitian(T2)
    e1, W1 = np.linalg.eigh(H1)
    e2, W2 = np.linalg.eigh(H2)
    if np.abs(e1 - e2).max() > tol * max(1.0, np.abs(e1).max()):
        return CurvatureComparison("distinguished", "eig(generic Hermitian combination)", (e1.tolist(), e2.tolist()), True)
    scale = max(1.0, np.abs(e1).max())
    blocks1 = [A for _, A in _letters(T1)]
    blocks2 = [A for _, A in _letters(T2)]
    if np.all(np.abs(np.diff(e1)) > 1e-6 * scale):
        phi = _phase_match([W1.conj().T @ A @ W1 for A in blocks1], [W2.conj().T @ A @ W2 for A in blocks2], tol * scale)
        if phi is None:
            return CurvatureComparison("distinguished", "canonical form", None, True)
        U = W2 @ np.diag(phi) @ W1.conj().T
        return CurvatureComparison("not-distinguished", None, None, True, U)
    if all(np.abs(A - A[0, 0] * np.eye(d)).max() <= tol * scale for A in blocks1):
        # all blocks scalar: equal word traces already force equality
        return CurvatureComparison("not-distinguished", None, None, True, np.eye(d, dtype=complex))
    return CurvatureComparison("not-distinguished", None, None, False)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
