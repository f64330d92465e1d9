"""gkdvlab: a pseudospectral laboratory for the supercritical generalized
KdV equation psi_t + psi_xxx + (|psi|^{p-1} psi)_x = 0 with real p >= 5.

Frequency-localized analysis at base 1.01, variation-norm machinery, scaling
law verification for the dispersive estimates, and a contraction-mapping
solver with a direct pseudospectral oracle.
"""

__version__ = "0.1.0"

from .grid import (
    NORMALIZATION_TAG,
    Field,
    GridError,
    GridMismatchError,
    GridSpec,
    MultiplierSymmetryError,
    NonFiniteFieldError,
    Path,
    apply_multiplier,
    derivative,
    forward_transform,
    inverse_transform,
    l2_norm,
    lq_norm,
    mixed_norm,
)
from .airy import Propagator, duhamel, evolve, free_solution
from .estimates import (
    EstimateReport,
    TrialEnsemble,
    l6_smallness_report,
    verify_bernstein_linfty,
    verify_bilinear,
    verify_interpolated,
    verify_l6_smallness,
    verify_multilinear,
    verify_strichartz,
)
from .littlewood_paley import LPScale, project, project_leq, project_lt, scale
from .nonlinearity import (
    PowerLaw,
    dealiased_product,
    evaluate_power,
    quintic_expansion_check,
    telescoping_check,
    truncation_operator,
)
from .norms import (
    CriticalIndex,
    NormReport,
    besov_norm,
    besov_report,
    critical_index,
    rescale,
    rescale_path,
    sobolev_norm,
    sobolev_report,
    xs_norm,
    xs_report,
)
from .picard import (
    BlowUpError,
    IterationTrace,
    PicardConfig,
    PicardDivergenceError,
    amplitude_threshold,
    direct_solve,
    lipschitz_probe,
    picard_step,
    solve_picard,
)
from .variation import (
    SampledPath,
    bilinear_form,
    duality_lower_bound,
    sampled_from_path,
    v2_kdv_norm,
    vp_norm,
)

__all__ = [
    "NORMALIZATION_TAG",
    "Field",
    "GridError",
    "GridMismatchError",
    "GridSpec",
    "MultiplierSymmetryError",
    "NonFiniteFieldError",
    "Path",
    "apply_multiplier",
    "derivative",
    "forward_transform",
    "inverse_transform",
    "l2_norm",
    "lq_norm",
    "mixed_norm",
    "Propagator",
    "duhamel",
    "evolve",
    "free_solution",
    "EstimateReport",
    "TrialEnsemble",
    "l6_smallness_report",
    "verify_bernstein_linfty",
    "verify_bilinear",
    "verify_interpolated",
    "verify_l6_smallness",
    "verify_multilinear",
    "verify_strichartz",
    "LPScale",
    "project",
    "project_leq",
    "project_lt",
    "scale",
    "PowerLaw",
    "dealiased_product",
    "evaluate_power",
    "quintic_expansion_check",
    "telescoping_check",
    "truncation_operator",
    "CriticalIndex",
    "NormReport",
    "besov_norm",
    "besov_report",
    "critical_index",
    "rescale",
    "rescale_path",
    "sobolev_norm",
    "sobolev_report",
    "xs_norm",
    "xs_report",
    "BlowUpError",
    "IterationTrace",
    "PicardConfig",
    "PicardDivergenceError",
    "amplitude_threshold",
    "direct_solve",
    "lipschitz_probe",
    "picard_step",
    "solve_picard",
    "SampledPath",
    "bilinear_form",
    "duality_lower_bound",
    "sampled_from_path",
    "v2_kdv_norm",
    "vp_norm",
    "__version__",
]
