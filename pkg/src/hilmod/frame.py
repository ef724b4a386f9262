"""Polar decomposition of the stacked adjoint, frame series and metric jets.

With ``D = D_(M-w0)^* = U S V^*`` (thin SVD, rank ``r``) the parts are

* ``V_polar = U_r V_r^*`` (partial isometry),
* ``Q = V_r S_r^{-1} V_r^*`` (inverse of ``|D|`` off the kernel, zero on it),
* ``R = Q V_polar^* = V_r S_r^{-1} U_r^*``.

The frame through a joint-kernel vector ``v`` is ``sum_k (R D_{conj(w - w0)})^k v``;
its coefficient at ``conj(w - w0)^J`` obeys ``c_J = sum_i T_i c_{J - e_i}`` where
``T_i`` is ``R`` restricted to the ``i``-th block of the stacked codomain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateFrameError,
    IllSeparatedKernelError,
    OutOfRadiusError,
    TruncationStarvationError,
)
from .linop import (
    DEFAULT_EPS,
    STARVATION_TOL,
    JointKernel,
    adjoint_at,
    joint_kernel,
)
from .rkhs import TruncatedModule, check_point, multi_indices

SEPARATION = 10.0


@dataclass(frozen=True)
class PolarParts:
    point: np.ndarray
    D: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    P_ker: np.ndarray = field(repr=False)
    P_ran: np.ndarray = field(repr=False)
    kernel: JointKernel
    rows_per_block: int

    @property
    def R_norm(self) -> float:
        return float(np.linalg.norm(self.R, 2))

    @property
    def radius(self) -> float:
        return 1.0 / self.R_norm

    def left_residual(self) -> float:
        """``||R D - (I - P_ker)||``."""
        n = self.D.shape[1]
        return float(np.linalg.norm(self.R @ self.D - (np.eye(n) - self.P_ker), 2))

    def right_residual(self) -> float:
        """``||D R - P_ran||``."""
        return float(np.linalg.norm(self.D @ self.R - self.P_ran, 2))

    def block_R(self, i: int) -> np.ndarray:
        """``R`` applied to the ``i``-th component (1-based) of the stacked codomain."""
        r = self.rows_per_block
        return self.R[:, (i - 1) * r : i * r]


def polar_parts(module: TruncatedModule, w0, eps: float = DEFAULT_EPS, starvation_tol: float = STARVATION_TOL) -> PolarParts:
    w0 = check_point(w0, module.m)
    kernel = joint_kernel(module, w0, eps, starvation_tol)
    op = adjoint_at(module, w0)
    D = op.matrix
    U, s, Vh = np.linalg.svd(D, full_matrices=False)
    thr = eps * s.max()
    near = s[(s > thr / SEPARATION) & (s < thr * SEPARATION)]
    if near.size:
        raise IllSeparatedKernelError(
            f"singular values {near} lie within a factor {SEPARATION} of the rank threshold {thr:.3e}"
        )
    keep = s > thr
    Ur, sr, Vr = U[:, keep], s[keep], Vh[keep].conj().T
    V = Ur @ Vr.conj().T
    Q = (Vr / sr) @ Vr.conj().T
    R = Q @ V.conj().T
    P_ran = Ur @ Ur.conj().T
    P_ker = kernel.projector
    return PolarParts(w0, D, V, Q, R, P_ker, P_ran, kernel, op.rows_per_block)


def shift_operators(module: TruncatedModule, polar: PolarParts) -> list[np.ndarray]:
    """``T_i = R E_i Pi``: lift ``f`` into block ``i`` (degrees ``<= N-1``) then apply ``R``."""
    low = polar.rows_per_block
    return [polar.block_R(i)[:, :low] @ np.eye(module.n, dtype=complex)[:low] for i in range(1, module.m + 1)]


@dataclass(frozen=True)
class FrameSeries:
    """Holomorphic frame ``conj(w) -> P(conj(w), conj(w0)) v_j`` truncated at ``order``.

    ``coefficients[J]`` is an ``n x d`` array whose column ``j`` is the
    coefficient of ``conj(w - w0)^J`` in the frame through ``v_j``.
    """

    point: np.ndarray
    order: int
    kernel_basis: np.ndarray
    coefficients: dict
    radius: float
    module: TruncatedModule = field(repr=False)
    polar: PolarParts = field(repr=False)

    @property
    def d(self) -> int:
        return self.kernel_basis.shape[1]

    def coefficient(self, J) -> np.ndarray:
        return self.coefficients[tuple(J)]

    def homogeneous(self, w, k: int) -> np.ndarray:
        """Order-``k`` term ``(R D_{conj(w-w0)})^k v_j`` evaluated at ``w``."""
        dz = np.conj(check_point(w, self.module.m) - self.point)
        out = np.zeros_like(self.kernel_basis)
        for J in multi_indices(self.module.m, k, k):
            out = out + np.prod(dz ** np.asarray(J)) * self.coefficients[J]
        return out

    def evaluate(self, w) -> np.ndarray:
        return sum(self.homogeneous(w, k) for k in range(self.order + 1))


def frame_series(
    module: TruncatedModule,
    w0,
    order: int = 2,
    eps: float = DEFAULT_EPS,
    starvation_tol: float = STARVATION_TOL,
    polar: PolarParts | None = None,
    basis: np.ndarray | None = None,
) -> FrameSeries:
    """Frame coefficients up to total order ``order``.

    ``basis`` (columns, orthonormal coordinates) replaces the canonical
    joint-kernel basis; it must span the joint kernel at ``w0``, e.g. the
    monomials ``z_1, z_2`` themselves rather than their normalizations.
    """
    if order < 1:
        raise ArgumentError("frame order must be at least 1")
    if polar is None:
        polar = polar_parts(module, w0, eps, starvation_tol)
    w0 = polar.point
    T = shift_operators(module, polar)
    V0 = polar.kernel.basis
    if basis is not None:
        B = np.asarray(basis, dtype=complex).reshape(module.n, -1)
        off = np.linalg.norm(B - polar.P_ker @ B)
        if B.shape[1] != V0.shape[1] or off > 1e-10 * np.linalg.norm(B) or np.linalg.matrix_rank(B) < B.shape[1]:
            raise ArgumentError(f"frame basis does not span the {V0.shape[1]}-dimensional joint kernel at {w0}")
        V0 = B
    coeffs = {(0,) * module.m: V0}
    for J in multi_indices(module.m, order, 1):
        acc = np.zeros_like(V0)
        for i in range(module.m):
            if J[i] > 0:
                prev = list(J)
                prev[i] -= 1
                acc = acc + T[i] @ coeffs[tuple(prev)]
        coeffs[J] = acc
    top = module.degrees > module.N - 2
    for J, C in coeffs.items():
        total = np.linalg.norm(C, axis=0)
        spill = np.linalg.norm(C[top], axis=0)
        bad = (total > 0) & (spill > starvation_tol * total)
        if np.any(bad):
            raise TruncationStarvationError(
                f"frame coefficient {J} has relative mass {float((spill / np.where(total > 0, total, 1)).max()):.3e} "
                f"within two degrees of N={module.N}"
            )
    return FrameSeries(w0, order, V0, coeffs, polar.radius, module, polar)


def _inner(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``G[p, q] = <X_p, Y_q>`` over columns."""
    return X.T @ Y.conj()


@dataclass(frozen=True)
class MetricJet:
    """Second-order jet of ``h(w) = (<F_p(w), F_q(w)>)`` at the base point.

    ``mixed[i, j]`` is the ``d x d`` coefficient of ``(w - w0)_i conj(w - w0)_j``;
    ``antiholomorphic[j]`` the coefficient of ``conj(w - w0)_j`` and
    ``holomorphic[i]`` the coefficient of ``(w - w0)_i``.
    """

    point: np.ndarray
    h0: np.ndarray
    mixed: np.ndarray
    holomorphic: np.ndarray
    antiholomorphic: np.ndarray
    normalized: bool = False

    @property
    def m(self) -> int:
        return self.mixed.shape[0]

    @property
    def d(self) -> int:
        return self.h0.shape[0]

    def first_order_size(self) -> float:
        return float(max(np.abs(self.holomorphic).max(initial=0), np.abs(self.antiholomorphic).max(initial=0)))

    def evaluate(self, w) -> np.ndarray:
        """Second-order Taylor polynomial (without pure second-order terms)."""
        dw = np.asarray(w, dtype=complex) - self.point
        out = self.h0.astype(complex)
        for i in range(self.m):
            out = out + dw[i] * self.holomorphic[i] + np.conj(dw[i]) * self.antiholomorphic[i]
            for j in range(self.m):
                out = out + dw[i] * np.conj(dw[j]) * self.mixed[i, j]
        return out


def metric_jet(frame: FrameSeries, order: int = 2) -> MetricJet:
    if order != 2:
        raise ArgumentError("only second-order jets are supported")
    if frame.order < 2:
        raise ArgumentError("metric jet needs a frame of order >= 2")
    m = frame.module.m
    C0 = frame.coefficient((0,) * m)
    E = [frame.coefficient(tuple(int(k == i) for k in range(m))) for i in range(m)]
    h0 = _inner(C0, C0)
    mixed = np.empty((m, m) + h0.shape, dtype=complex)
    for i in range(m):
        for j in range(m):
            # w_i arrives through the conjugated second slot, conj(w_j) through the first
            mixed[i, j] = _inner(E[j], E[i])
    hol = np.array([_inner(C0, E[i]) for i in range(m)])
    anti = np.array([_inner(E[j], C0) for j in range(m)])
    return MetricJet(frame.point, h0, mixed, hol, anti, False)


def inverse_sqrt(G: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh((G + G.conj().T) / 2)
    if evals.min() <= 1e-12 * max(evals.max(), 1e-300):
        raise DegenerateFrameError(f"frame Gram matrix is singular (eigenvalues {evals})")
    return (evecs / np.sqrt(evals)) @ evecs.conj().T


def normalize_jet(jet: MetricJet) -> MetricJet:
    """Conjugate every part by ``h0^{-1/2}`` so the order-zero term is the identity."""
    if jet.normalized:
        return jet
    S = inverse_sqrt(jet.h0)
    if np.allclose(S, np.eye(jet.d), rtol=0, atol=1e-15):
        return replace(jet, h0=np.eye(jet.d, dtype=complex), normalized=True)

    def conj_by(A):
        return S @ A @ S

    mixed = np.array([[conj_by(jet.mixed[i, j]) for j in range(jet.m)] for i in range(jet.m)])
    hol = np.array([conj_by(A) for A in jet.holomorphic])
    anti = np.array([conj_by(A) for A in jet.antiholomorphic])
    return MetricJet(jet.point, np.eye(jet.d, dtype=complex), mixed, hol, anti, True)


def frame_annihilation_residual(module: TruncatedModule, w0, w, order: int = 2, eps: float = DEFAULT_EPS, frame: FrameSeries | None = None) -> float:
    """``max_j ||P_ran(w0) D_(M-w)^* P(conj w, conj w0) v_j||`` for the order-``order`` frame."""
    if frame is None:
        frame = frame_series(module, w0, order, eps)
    w = check_point(w, module.m)
    dist = float(np.linalg.norm(w - frame.point))
    if dist >= frame.radius:
        raise OutOfRadiusError(f"|w - w0| = {dist:.3e} outside convergence radius {frame.radius:.3e}")
    if dist == 0:
        return 0.0
    F = frame.evaluate(w)
    Y = frame.polar.P_ran @ (adjoint_at(module, w).matrix @ F)
    return float(np.linalg.norm(Y, axis=0).max())


def projected_kernel_dim(module: TruncatedModule, polar: PolarParts, w, eps: float = DEFAULT_EPS) -> int:
    """``dim ker P_ran(w0) D_(M-w)^*``."""
    A = polar.P_ran @ adjoint_at(module, w).matrix
    s = np.linalg.svd(A, compute_uv=False)
    n = A.shape[1]
    s_full = np.zeros(n)
    s_full[: s.size] = s[:n]
    return int(np.count_nonzero(s_full <= eps * s_full.max()))

