"""Truncated multiplication operators and joint kernels of their adjoints.

Truncation model
----------------
``M_j`` is compressed to the degree ``<= N`` space, so monomials of degree ``N``
are sent to zero.  The stacked operator ``f -> ((M_j - w_j)^* f)_j`` is taken
from the degree ``<= N`` space into ``m`` copies of the degree ``<= N - 1``
space: every row it keeps is computed without truncation error, and the
truncated kernel vector ``K_w`` is an exact null vector for every ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ArgumentError,
    DegenerateModuleError,
    DomainError,
    OnVarietyError,
    TruncationStarvationError,
)
from .rkhs import TruncatedModule, check_point, kernel_vector

DEFAULT_EPS = 1e-9
STARVATION_TOL = 1e-10


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix in orthonormalized monomial coordinates."""

    matrix: np.ndarray
    module: TruncatedModule = field(repr=False)
    variable: int
    truncated: bool

    @property
    def adjoint(self) -> np.ndarray:
        return self.matrix.conj().T


def mult_operator(module: TruncatedModule, j: int) -> OperatorMatrix:
    """Multiplication by ``z_j`` (``1 <= j <= m``), compressed to degree ``<= N``.

    Column ``alpha`` holds ``||z^(alpha+e_j)|| / ||z^alpha||`` at row ``alpha + e_j``.
    Columns of top degree are zero and ``truncated`` records that they were cut.
    """
    if not 1 <= j <= module.m:
        raise ArgumentError(f"variable index {j} out of range 1..{module.m}")
    n = module.n
    M = np.zeros((n, n), dtype=complex)
    truncated = False
    for col, alpha in enumerate(module.basis):
        beta = list(alpha)
        beta[j - 1] += 1
        row = module.index.get(tuple(beta))
        if row is None:
            truncated = True
            continue
        M[row, col] = module.norms[row] / module.norms[col]
    return OperatorMatrix(M, module, j, truncated)


@dataclass(frozen=True)
class StackedOperator:
    """``D_(M-w)^*`` as an ``(m * n_low) x n`` matrix; block ``j`` is ``(M_j - w_j)^*``."""

    matrix: np.ndarray
    point: np.ndarray
    module: TruncatedModule = field(repr=False)
    rows_per_block: int

    def block(self, j: int) -> np.ndarray:
        r = self.rows_per_block
        return self.matrix[(j - 1) * r : j * r]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def split(self, y: np.ndarray) -> list[np.ndarray]:
        r = self.rows_per_block
        return [y[i * r : (i + 1) * r] for i in range(self.module.m)]


def _adjoint_blocks(module: TruncatedModule) -> list[np.ndarray]:
    low = module.count_below(module.N - 1)
    return [mult_operator(module, j).adjoint[:low] for j in range(1, module.m + 1)]


def adjoint_at(module: TruncatedModule, w) -> StackedOperator:
    w = check_point(w, module.m)
    low = module.count_below(module.N - 1)
    proj = np.eye(module.n, dtype=complex)[:low]
    blocks = [A - np.conj(w[j]) * proj for j, A in enumerate(_adjoint_blocks(module))]
    return StackedOperator(np.vstack(blocks), w, module, low)


def stacked_shift(module: TruncatedModule, dw) -> np.ndarray:
    """Matrix of ``f -> (dw_1 f, ..., dw_m f)`` into the stacked codomain (dw already conjugated)."""
    low = module.count_below(module.N - 1)
    proj = np.eye(module.n, dtype=complex)[:low]
    return np.vstack([c * proj for c in np.asarray(dw, dtype=complex)])


@dataclass(frozen=True)
class JointKernel:
    """Orthonormal basis (columns) of ``ker D_(M-w)^*`` with its rank certificate."""

    point: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray
    sigma_max: float
    eps: float
    top_mass: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def threshold(self) -> float:
        return self.eps * self.sigma_max

    @property
    def gap(self) -> tuple[float, float]:
        """(largest singular value counted as zero, smallest counted as nonzero)."""
        s = self.singular_values
        below = s[s <= self.threshold]
        above = s[s > self.threshold]
        return (float(below.max()) if below.size else 0.0, float(above.min()) if above.size else np.inf)

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def _full_singular_values(D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values padded with zeros to length ``n`` (columns), and ``Vh``."""
    _, s, Vh = np.linalg.svd(D, full_matrices=True)
    n = D.shape[1]
    s_full = np.zeros(n)
    s_full[: s.size] = s
    return s_full, Vh


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-modulus coordinate (first one on ties) is real positive."""
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
    return v * (np.conj(v[k]) / mags[k])


def canonical_basis(P: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of ``ran P`` that depends only on the subspace.

    Pivot coordinates are chosen greedily by residual norm of the projected unit
    vectors, then Gram-Schmidt runs over those projected unit vectors in basis
    order.  A subspace spanned by unit vectors yields exactly those unit vectors.
    """
    n = P.shape[0]
    if dim == 0:
        return np.zeros((n, 0), dtype=complex)
    _, _, piv = scipy.linalg.qr(P, pivoting=True, mode="economic")
    cols = sorted(piv[:dim])
    Q = np.zeros((n, dim), dtype=complex)
    for k, c in enumerate(cols):
        v = P[:, c].astype(complex)
        for _ in range(2):
            v = v - Q[:, :k] @ (Q[:, :k].conj().T @ v)
        Q[:, k] = v / np.linalg.norm(v)
    return np.column_stack([fix_phase(Q[:, k]) for k in range(dim)])


def top_degree_mass(module: TruncatedModule, X: np.ndarray, depth: int = 2) -> float:
    """Largest fraction of squared norm carried by degrees ``> N - depth`` over columns of ``X``."""
    if X.size == 0:
        return 0.0
    top = module.degrees > module.N - depth
    num = np.sum(np.abs(X[top]) ** 2, axis=0)
    den = np.sum(np.abs(X) ** 2, axis=0)
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(ratio.max())


def joint_kernel(module: TruncatedModule, w, eps: float = DEFAULT_EPS, starvation_tol: float = STARVATION_TOL) -> JointKernel:
    """Joint kernel of the shifted adjoints at ``w``.

    The dimension is the number of singular values ``<= eps * sigma_max``.  At
    ``w = 0`` the null vectors are polynomials, so non-negligible mass in the top
    two degrees means the truncation is too small; elsewhere the truncated
    kernel vectors have geometric tails and ``top_mass`` is only reported.
    """
    if not 0 < eps < 1:
        raise ArgumentError("eps must lie in (0, 1)")
    w = check_point(w, module.m)
    if np.any(np.abs(w) >= 1):
        raise DomainError(f"point {w} is outside the open polydisc")
    D = adjoint_at(module, w).matrix
    if D.shape[0] == 0:
        raise TruncationStarvationError(f"module has no elements of degree <= N-1 = {module.N - 1}")
    s, Vh = _full_singular_values(D)
    smax = float(s.max())
    if smax == 0:
        raise DegenerateModuleError("stacked adjoint operator is zero")
    null = Vh[s <= eps * smax].conj().T
    dim = null.shape[1]
    basis = canonical_basis(null @ null.conj().T, dim)
    mass = top_degree_mass(module, basis)
    if np.all(w == 0) and mass > starvation_tol:
        raise TruncationStarvationError(
            f"null vectors carry {mass:.3e} of their mass in the top two degrees (N={module.N})"
        )
    return JointKernel(w, basis, np.sort(s)[::-1], smax, eps, mass)


def rrqr_kernel(module: TruncatedModule, w, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Independent null-space basis from column-pivoted QR of ``D^*``."""
    D = adjoint_at(module, w).matrix
    Q, R, _ = scipy.linalg.qr(D.conj().T, pivoting=True, mode="full")
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > eps * diag.max())) if diag.size else 0
    return Q[:, rank:]


def eigenvector_residual(module: TruncatedModule, w) -> float:
    """``max_j ||(M_j^* - conj(w_j)) K_w|| / ||K_w||`` with the square compression.

    Only the top-degree coordinates contribute, so the value measures how far the
    truncated kernel vector is from being a joint eigenvector.
    """
    K = kernel_vector(module, w).vector
    nrm = np.linalg.norm(K)
    if nrm == 0:
        raise OnVarietyError(f"kernel vector vanishes at {w}")
    w = np.asarray(w, dtype=complex)
    res = 0.0
    for j in range(1, module.m + 1):
        A = mult_operator(module, j).adjoint
        res = max(res, float(np.linalg.norm(A @ K - np.conj(w[j - 1]) * K)))
    return res / nrm
