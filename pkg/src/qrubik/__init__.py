"""Strongly nonlocal entangled state sets from cube partitions.

Construction of orthogonal entangled sets and bases in d x d x d from a
layered cube partition, numerical certification that every
orthogonality-preserving local measurement is trivial on every side of every
bipartition, per-state Schmidt-rank analysis, and simulation of
entanglement-assisted discrimination protocols with exact expected resource
accounting.
"""

from .states import (
    DEFAULT_TOL,
    Bipartition,
    PartyLayout,
    PureState,
    SetReport,
    StateSet,
    embed_shift,
    flatten,
    inner_product,
    load_state_set,
    norm,
    save_state_set,
    state_set_from_dict,
    state_set_to_dict,
    validate_set,
)
from .cube import (
    LayerDecomposition,
    Subcube,
    build_snoeb,
    build_snoes,
    completion_states,
    decompose_layer,
    ghz_like_states,
    layer_sizes,
    root_of_unity,
    tripartite_layout,
)
from .entangle import EntanglementProfile, entanglement_profile, profile_rows, schmidt_rank
from .verify import (
    CheckResult,
    ConstraintSystem,
    NonlocalityReport,
    TrivialityVerdict,
    assemble_constraints,
    certify_triviality,
    coords_from_hermitian,
    hermitian_from_coords,
    identity_coords,
    solution_space,
    verify_strong_nonlocality,
)
from .locc import (
    ExecutionReport,
    Leaf,
    MeasurementOperator,
    MeasurementStep,
    ProtocolError,
    ProtocolSpec,
    Register,
    RegisterTable,
    ResourceDecl,
    SimState,
    Teleport,
    apply_measurement,
    check_orthogonality_preservation,
    parse_protocol,
    run_protocol,
    teleport,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "Bipartition",
    "PartyLayout",
    "PureState",
    "SetReport",
    "StateSet",
    "embed_shift",
    "flatten",
    "inner_product",
    "load_state_set",
    "norm",
    "save_state_set",
    "state_set_from_dict",
    "state_set_to_dict",
    "validate_set",
    "LayerDecomposition",
    "Subcube",
    "build_snoeb",
    "build_snoes",
    "completion_states",
    "decompose_layer",
    "ghz_like_states",
    "layer_sizes",
    "root_of_unity",
    "tripartite_layout",
    "EntanglementProfile",
    "entanglement_profile",
    "profile_rows",
    "schmidt_rank",
    "CheckResult",
    "ConstraintSystem",
    "NonlocalityReport",
    "TrivialityVerdict",
    "assemble_constraints",
    "certify_triviality",
    "coords_from_hermitian",
    "hermitian_from_coords",
    "identity_coords",
    "solution_space",
    "verify_strong_nonlocality",
    "ExecutionReport",
    "Leaf",
    "MeasurementOperator",
    "MeasurementStep",
    "ProtocolError",
    "ProtocolSpec",
    "Register",
    "RegisterTable",
    "ResourceDecl",
    "SimState",
    "Teleport",
    "apply_measurement",
    "check_orthogonality_preservation",
    "parse_protocol",
    "run_protocol",
    "teleport",
    "__version__",
]
