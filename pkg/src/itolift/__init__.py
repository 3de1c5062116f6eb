"""
itolift: pseudo-differential operators on periodic grids, their shear
(Itô) transform, and numerical checks of the intertwining of the base and
lifted heat semigroups.
"""

from .errors import ConfigurationError, ContractError, ItoLiftError, NumericError, ShapeError
from .grid import (
    PeriodicGrid,
    SpectralVector,
    derivative_matrix,
    forward,
    fractional_laplacian,
    inner_product,
    inverse,
    l2_norm,
    make_grid,
    multiplier_matrix,
    transform,
)
from .lift import (
    ItoCheck,
    LiftedField,
    ShearMap,
    AuxiliaryResult,
    auxiliary_commutator,
    band_projector,
    conjugate_by_shear,
    default_fiber_period,
    duhamel_residual,
    fiber_block,
    graph_trace,
    ito_residual,
    ito_transform,
    lift_vector_field,
    shear_apply,
    shear_matrix,
    tensor_base,
    tensor_fiber,
    vector_field_defect,
)
from .operator import OperatorMatrix
from .quantization import adjoint_op, assemble_l0, compose_l, kernel_pair
from .semigroup import (
    CutoffRow,
    SemigroupSpec,
    SeriesResult,
    SpectralPropagator,
    cutoff_convergence,
    semigroup,
    semigroup_eig,
    semigroup_series,
)
from .symbols import (
    BUILTIN_SYMBOLS,
    Symbol,
    bump_phi,
    builtin_symbol,
    cutoff_symbol,
    SymbolEstimateReport,
    ellipticity_constant,
    symbol_estimate_report,
)
from .trig import TrigPolynomial

__version__ = "0.1.0"
