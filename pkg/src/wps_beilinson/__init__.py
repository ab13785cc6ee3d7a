"""Weighted Beilinson resolution of the diagonal, checked by graded linear algebra."""

from .beilinson import (
    MmPair,
    ResolutionBundle,
    build_B,
    build_koszul,
    build_Mm,
    build_mu,
    build_R,
    closed_form_differential,
    verify_augmentation,
)
from .complexes import (
    ChainMap,
    FreeGradedComplex,
    Term,
    TwistComplex,
    box_sheaf_complex,
    check_d_squared,
    is_chain_map,
    mapping_cone,
    shift,
    twist_by,
)
from .graded_core import (
    RATIONALS,
    BiEntry,
    FieldConfig,
    Polynomial,
    WeightVector,
    coh_P_line_bundle,
    dim_graded_piece,
    monomial_basis,
    mult_matrix,
)
from .ktheory_x import (
    HypersurfaceModel,
    chi_X_twist,
    operator_matrices,
    orthogonal_sublattice,
    recurrence_coefficients,
    verify_fano_identity,
    verify_monodromy_identity,
)
from .report import VerificationReport
from .sheaf_cohomology import (
    euler_series_check,
    fm1_apply,
    strand_homology,
    verify_Blk_cohomology,
    verify_diagonal_resolution,
    verify_koszul_exactness,
    verify_Mres,
)

__version__ = "0.1.0"
