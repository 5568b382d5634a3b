import atexit

from gammakit.classifiers import (
    SupResult,
    contraction_verdict,
    is_gamma_coisometry,
    is_gamma_isometry,
    is_gamma_unitary,
    product_unitary_promotion,
    sup_on_gamma,
    unitary_generators,
    vn_margin,
)
from gammakit.core import Budget, GammaPoint, Verdict, init, match_distance, shutdown
from gammakit.exceptions import (
    AnalyticityError,
    ConvergenceError,
    DecompositionError,
    DimensionMismatchError,
    GammaKitError,
    InconsistencyError,
    NotSymmetricError,
    PreconditionError,
    SingularSymbolError,
)
from gammakit.geometry import (
    UniPoly,
    boundary_from_mu,
    char_poly,
    embed,
    fiber,
    in_gamma,
    is_self_inversive,
    on_boundary,
    project,
    roots,
    sample,
)
from gammakit.model.blh import (
    InnerSymbol,
    innerness_defect,
    intertwine_solve,
    invariant_subspace_verdict,
    unitary_equiv,
)
from gammakit.model.hardy import (
    ModelTuple,
    StructuredTuple,
    SymbolTuple,
    apply_poly,
    build_pure_isometry,
    check_symbol_conditions,
    fundamental_invariant,
    make_direct_sum,
    truncate,
    wold_decompose,
)
from gammakit.model.symbol import (
    MatrixSymbol,
    symbol_add,
    symbol_mul,
    symbol_scale,
    symbol_sup_norm,
)
from gammakit.operators import (
    MatrixTuple,
    commutation_defect,
    compress,
    invariant_defect,
    is_normal_tuple,
    joint_spectrum,
    symmetrize_tuple,
)
from gammakit.symmetric import MultiPoly, elem_sym, is_symmetric, reduce_symmetric, symmetrize_point

name = "gammakit"

__version__ = "0.1.0"

__all__ = [
    # runtime
    "init",
    "shutdown",
    # values
    "GammaPoint",
    "Verdict",
    "Budget",
    "match_distance",
    # symmetric functions
    "MultiPoly",
    "elem_sym",
    "symmetrize_point",
    "is_symmetric",
    "reduce_symmetric",
    # geometry
    "UniPoly",
    "char_poly",
    "roots",
    "in_gamma",
    "fiber",
    "is_self_inversive",
    "on_boundary",
    "project",
    "embed",
    "boundary_from_mu",
    "sample",
    # operators
    "MatrixTuple",
    "commutation_defect",
    "is_normal_tuple",
    "joint_spectrum",
    "symmetrize_tuple",
    "invariant_defect",
    "compress",
    # classifiers
    "SupResult",
    "sup_on_gamma",
    "vn_margin",
    "contraction_verdict",
    "is_gamma_unitary",
    "unitary_generators",
    "is_gamma_isometry",
    "is_gamma_coisometry",
    "product_unitary_promotion",
    # model
    "MatrixSymbol",
    "symbol_mul",
    "symbol_add",
    "symbol_scale",
    "symbol_sup_norm",
    "SymbolTuple",
    "ModelTuple",
    "StructuredTuple",
    "check_symbol_conditions",
    "build_pure_isometry",
    "apply_poly",
    "truncate",
    "fundamental_invariant",
    "make_direct_sum",
    "wold_decompose",
    # invariant subspaces
    "InnerSymbol",
    "innerness_defect",
    "intertwine_solve",
    "invariant_subspace_verdict",
    "unitary_equiv",
    # exceptions
    "GammaKitError",
    "DimensionMismatchError",
    "NotSymmetricError",
    "PreconditionError",
    "DecompositionError",
    "ConvergenceError",
    "SingularSymbolError",
    "AnalyticityError",
    "InconsistencyError",
]

atexit.register(shutdown)
