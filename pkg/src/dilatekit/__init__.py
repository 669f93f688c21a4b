"""Explicit finite-dimensional dilations from finite moment data.

Construct unitary or normal operators on an explicitly sized space whose
compressions reproduce prescribed moments: single contractions and
numerical-radius operators via a block Toeplitz GNS construction,
commuting tuples / annulus data / q-commuting pairs via measure fitting
with Caratheodory reduction, and boundary measures of a numerical range
via quadrature.  Every construction ships with an independent
verification report and dimension accounting.
"""

from .errors import (
    DilatekitError,
    DimensionMismatchError,
    GridEmptyError,
    InfeasibleError,
    InvalidCombinationError,
    MalformedInputError,
    NonConvexCurveError,
    NonPSDWeightError,
    NonSquareError,
    NotCommutingError,
    NotContainedError,
    NotHermitianError,
    NotIsometricError,
    NotNormalizedError,
    NotPSDError,
    ResolventSingularError,
    ShapeMismatchError,
    ZeroCoefficientError,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    asmatrix,
    complete_isometry_to_unitary,
    herm_eig,
    herm_part,
    hunvec,
    hvec,
    inv_sqrt_psd,
    numerical_rank_factor,
    polar_isometry,
    psd_project,
)
from .convex import (
    LiftedPoint,
    MatrixConvexCombination,
    MatrixPoint,
    caratheodory_reduce,
    compress_to_surjective,
    decompose_irreducible,
    irreducible_split,
    lift_combination,
    ntrace,
    unlift_point,
)
from .moments import (
    Dilation,
    MomentTable,
    circle_moments,
    laurent_moments,
    qcommuting_moments,
    regular_moments,
    toeplitz_gns_unitary,
    toeplitz_kernel,
    word_image,
)
from .measures import (
    AtomicMeasure,
    FitOptions,
    IrrepAtom,
    PointAtom,
    annulus_grid,
    assemble_atomic_dilation,
    circle_grid,
    clock_phase_grid,
    clock_shift_irrep,
    combination_to_measure,
    fit_matrix_measure,
    laurent_scalar,
    measure_to_combination,
    torus_grid,
)
from .boundary import (
    BoundaryCurve,
    RangeReport,
    boundary_density,
    cauchy_transform,
    contains_numerical_range,
    numerical_range,
    quadrature_measure,
)
from .verify import (
    DimensionReport,
    Relations,
    VerificationReport,
    dimension_report,
    verify_dilation,
)
from .pipelines import (
    PipelineResult,
    dilate_annulus,
    dilate_boundary,
    dilate_circle,
    dilate_qcommute,
    dilate_regular,
)

__version__ = "0.1.0"

__all__ = [
    "DilatekitError",
    "NonSquareError",
    "NotHermitianError",
    "NotPSDError",
    "DimensionMismatchError",
    "ShapeMismatchError",
    "NotIsometricError",
    "InvalidCombinationError",
    "NotNormalizedError",
    "ZeroCoefficientError",
    "NotCommutingError",
    "InfeasibleError",
    "GridEmptyError",
    "NonPSDWeightError",
    "NonConvexCurveError",
    "NotContainedError",
    "ResolventSingularError",
    "MalformedInputError",
    "Tolerances",
    "DEFAULT_TOL",
    "asmatrix",
    "herm_part",
    "herm_eig",
    "numerical_rank_factor",
    "psd_project",
    "polar_isometry",
    "inv_sqrt_psd",
    "complete_isometry_to_unitary",
    "hvec",
    "hunvec",
    "ntrace",
    "MatrixPoint",
    "MatrixConvexCombination",
    "LiftedPoint",
    "lift_combination",
    "unlift_point",
    "compress_to_surjective",
    "caratheodory_reduce",
    "irreducible_split",
    "decompose_irreducible",
    "MomentTable",
    "Dilation",
    "circle_moments",
    "regular_moments",
    "qcommuting_moments",
    "laurent_moments",
    "toeplitz_kernel",
    "toeplitz_gns_unitary",
    "word_image",
    "PointAtom",
    "IrrepAtom",
    "AtomicMeasure",
    "FitOptions",
    "circle_grid",
    "torus_grid",
    "annulus_grid",
    "clock_shift_irrep",
    "clock_phase_grid",
    "laurent_scalar",
    "fit_matrix_measure",
    "assemble_atomic_dilation",
    "measure_to_combination",
    "combination_to_measure",
    "BoundaryCurve",
    "RangeReport",
    "numerical_range",
    "contains_numerical_range",
    "boundary_density",
    "quadrature_measure",
    "cauchy_transform",
    "Relations",
    "VerificationReport",
    "DimensionReport",
    "verify_dilation",
    "dimension_report",
    "PipelineResult",
    "dilate_circle",
    "dilate_regular",
    "dilate_boundary",
    "dilate_annulus",
    "dilate_qcommute",
]
