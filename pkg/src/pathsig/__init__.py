"""Truncated tensor algebra, exact path signatures, and signature regression."""

from .tensor import (
    GroupElement,
    ShapeMismatchError,
    TensorShape,
    TruncatedTensor,
    tensor_exp,
    tensor_inverse,
    tensor_log,
)
from .words import LinearFunctional, pair, shuffle, shuffle_closure_check, shuffle_words
from .norms import (
    HoelderParams,
    hoelder_grid,
    hoelder_metric,
    hoelder_norm,
    level_norm,
    tensor_norm,
    time_extension_merge,
    time_extension_split,
    uniformity_counterexample,
)
from .paths import (
    MultiplicativeFunctional,
    PiecewiseLinearPath,
    TimeExtendedPath,
    chen_check,
    exact_pl_functional,
    lyons_lift,
    project_directions,
    pure_area_functional,
    signature_pl,
    time_extend,
    young_integrals,
)
from .grouplike import (
    block_shuffle_residual,
    dynkin_residuals,
    log_lie_residual,
    weak_grouplike_residual,
)
from .molecules import (
    Molecule,
    SampledFunction,
    ae_norm,
    dual_norm_via_molecules,
    elementary_probes,
    pairing,
    weakstar_convergence_check,
)
from .regression import (
    FamilySpec,
    FamilyBoundError,
    PathFamily,
    SignatureFeatures,
    SignatureRegression,
    Target,
    generate_family,
    make_target,
    uat_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "GroupElement",
    "ShapeMismatchError",
    "TensorShape",
    "TruncatedTensor",
    "tensor_exp",
    "tensor_inverse",
    "tensor_log",
    "LinearFunctional",
    "pair",
    "shuffle",
    "shuffle_closure_check",
    "shuffle_words",
    "HoelderParams",
    "hoelder_grid",
    "hoelder_metric",
    "hoelder_norm",
    "level_norm",
    "tensor_norm",
    "time_extension_merge",
    "time_extension_split",
    "uniformity_counterexample",
    "MultiplicativeFunctional",
    "PiecewiseLinearPath",
    "TimeExtendedPath",
    "chen_check",
    "exact_pl_functional",
    "lyons_lift",
    "project_directions",
    "pure_area_functional",
    "signature_pl",
    "time_extend",
    "young_integrals",
    "block_shuffle_residual",
    "dynkin_residuals",
    "log_lie_residual",
    "weak_grouplike_residual",
    "Molecule",
    "SampledFunction",
    "ae_norm",
    "dual_norm_via_molecules",
    "elementary_probes",
    "pairing",
    "weakstar_convergence_check",
    "FamilySpec",
    "FamilyBoundError",
    "PathFamily",
    "SignatureFeatures",
    "SignatureRegression",
    "Target",
    "generate_family",
    "make_target",
    "uat_sweep",
]
