"""Exact computations in Orlicz-Lorentz spaces over step functions."""

from .errors import InternalConsistencyError, PreconditionError
from .exposure import (
    AttainmentReport,
    BlockConstruction,
    ExposureVerdict,
    SupportingFunctional,
    counterexample_sequence,
    grad_in_koethe_dual,
    nabla2_failure_blocks,
    norm_attainment_check,
    perturbation_family,
    precheck_thm1,
    precheck_thm2,
    sep_space_check,
    strongly_exposed_classify,
    supporting_functional,
)
from .level import (
    LevelDecomposition,
    dual_amemiya,
    dual_k_interval,
    dual_modular_bruteforce,
    dual_modular_formulas,
    dual_modular_P,
    dual_norm,
    level_decompose,
)
from .modular import (
    KInterval,
    OrliczNorm,
    amemiya,
    k_interval,
    luxemburg_norm,
    modular_rho,
    orlicz_norm,
    orlicz_norm_dual_oracle,
    theta,
)
from .orlicz import (
    AffineStructure,
    Final,
    OrliczFunction,
    Segment,
    affine_structure,
    conjugate,
    delta2,
    is_strictly_convex,
    limit_slope,
    nabla2,
    p,
    p_left,
    phi,
    young_gap,
)
from .rearrange import (
    MeasurePreservingMap,
    distribution,
    lorentz_norm,
    marcinkiewicz_norm,
    mpt,
    rearrangement,
    submajorizes,
)
from .step import (
    StepFunction,
    Weight,
    combine,
    cumulative_W,
    evaluate,
    integrate,
    is_regular,
    maximal_constant_intervals,
    merged_grid,
)

__version__ = "0.1.0"
