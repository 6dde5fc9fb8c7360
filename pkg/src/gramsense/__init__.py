"""Gram-matrix sensor placement and sparse force reconstruction for discrete structures."""

from .errors import (
    CombinatorialGuardError,
    ConstructionError,
    DecompositionError,
    DegenerateColumnError,
    DimensionMismatchError,
    GramsenseError,
    InsufficientExtremaError,
    InvalidParameterError,
    ParseError,
    PartialMeasurementError,
    ReconstructionError,
    RigidBodyModeError,
    SingularSystemError,
)
from .experiments import (
    ReconstructionMap,
    SweepReport,
    add_noise,
    frequency_sweep,
    od_mae,
    reconstruct_from_file,
    reconstruction_map,
    reconstruction_maps,
    sensor_configurations,
)
from .frf import FrfMatrix, NormalizedFrf, frf_direct, frf_modal, normalize_columns
from .gram import (
    GramMatrix,
    GramNorms,
    gram,
    gram_modal_approx,
    gram_mode_contribution,
    gram_norms,
    nearby_modes,
)
from .lasso import (
    LassoProblem,
    LassoSolution,
    default_mu,
    kkt_residual,
    reconstruct,
    soft_threshold,
    solve,
    solve_batch,
)
from .modal_model import (
    MechanicalSystem,
    ModalData,
    build_chain,
    build_irregular,
    mof,
    nearest_mode,
    solve_modes,
)
from .placement import (
    SensorSet,
    antinodal_select,
    exhaustive_select,
    greedy_select,
    nodal_indices,
    offdiag_objective,
)

__version__ = "0.1.0"
