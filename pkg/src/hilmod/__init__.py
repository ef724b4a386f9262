"""Numerical toolkit for Hilbert modules of holomorphic functions on the polydisc.

Joint kernels of shifted adjoint multiplications, frame series and curvature
of the associated Hermitian bundle, stalk generators and boundary privilege
checks, all on finite truncations of diagonal-kernel spaces.
"""

__version__ = "0.1.0"

from .curvature import (
    CurvatureTensor,
    NonCanonicalWarning,
    compare_curvature,
    curvature_at,
    lambda_mu_oracle,
    nk_curvature_closed,
    nk_curvature_numeric,
    section_limit,
)
from .errors import (
    ArgumentError,
    ConfigError,
    HilmodError,
    NumericalAnomaly,
    TruncationError,
)
from .frame import frame_series, metric_jet, normalize_jet, polar_parts
from .linop import adjoint_at, joint_kernel, mult_operator
from .privilege import Domain, PolyMatrix, privilege_verdict
from .rkhs import (
    DiagonalKernelSpec,
    MonomialIdeal,
    TruncatedModule,
    build_truncated_module,
    kernel_decompose,
    kernel_vector,
)
from .stalk import characteristic_space, gleason_report, minimal_generators

__all__ = [
    "ArgumentError",
    "ConfigError",
    "CurvatureTensor",
    "DiagonalKernelSpec",
    "Domain",
    "HilmodError",
    "MonomialIdeal",
    "NonCanonicalWarning",
    "NumericalAnomaly",
    "PolyMatrix",
    "TruncatedModule",
    "TruncationError",
    "adjoint_at",
    "build_truncated_module",
    "characteristic_space",
    "compare_curvature",
    "curvature_at",
    "frame_series",
    "gleason_report",
    "joint_kernel",
    "kernel_decompose",
    "kernel_vector",
    "lambda_mu_oracle",
    "metric_jet",
    "minimal_generators",
    "mult_operator",
    "nk_curvature_closed",
    "nk_curvature_numeric",
    "normalize_jet",
    "polar_parts",
    "privilege_verdict",
    "section_limit",
]
