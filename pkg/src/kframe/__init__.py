"""Frames in finite-dimensional Krein spaces.

Classification of J-frames, the J-frame operator, dual families, the
principal square root and Parseval J-frames with their Naimark dilations.
Hot loops run in a compiled extension when it is available (see
:data:`kframe.kernels.BACKEND`).
"""

__version__ = "0.1.0"

from .duality import (
    DualityReport,
    SignViolation,
    admissible_W,
    check_dual,
    dual_is_jframe,
    extract_W,
    generate_dual,
    minimal_norm_check,
    random_dual,
    w_range_criterion,
)
from .errors import (
    CrossOrthogonalityError,
    InconsistentDualError,
    InfeasibleSpecError,
    KFrameError,
    NotAJFrameError,
    PreconditionError,
    RegularityError,
    SectorError,
    ShapeError,
)
from .frames import FrameBounds, FrameFamily, excess, frame_bounds, similarity_witness, synthesis, synthesis_signed
from .jframe import (
    JFrameAnalysis,
    JFrameBounds,
    analyze_jframe,
    canonical_dual,
    coefficient_projection_E,
    jframe_operator,
    jframe_operator_apply,
    jframe_operator_characterization,
    nullspace_splitting,
    synthesis_adjoint,
)
from .kernels import BACKEND
from .krein import (
    Definiteness,
    KreinSpace,
    Subspace,
    classify_subspace,
    indef_product,
    is_maximal_definite,
    j_adjoint,
    j_companion,
    j_projection,
)
from .parseval import (
    Dilation,
    NotConstructed,
    align_to_decomposition,
    canonical_parseval,
    is_parseval,
    is_tight,
    naimark_coefficient_check,
    naimark_dilate,
    parseval_check,
    parseval_decomposition,
    parseval_dual_dilation,
    principal_sqrt,
    tight_characterization,
)
from .report import Report
from .testgen import GenSpec, oracle_sum, random_jframe, random_maximal_definite

__all__ = [name for name in dir() if not name.startswith("_")]
