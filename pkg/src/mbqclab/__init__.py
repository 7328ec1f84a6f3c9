"""Simulation lab for resource-state universality in measurement-based QC."""

from .engine import (
    Branch,
    BranchCapExceeded,
    CallbackStrategy,
    OutputMixture,
    ResourceState,
    Strategy,
    TableStrategy,
    build_graph_state,
    cluster_resource,
    cluster_strategy,
    cluster_target_circuit,
    run_all_branches,
    sample_run,
    tabulate_strategy,
)
from .optimize import optimize_corrections, optimize_product_overlap
from .quantifier import Decision, StrategyEncoding, Thresholds, accept_prob, decide, sandwich_check
from .reduction import (
    ParameterConstraintError,
    ReductionOutput,
    ReductionParams,
    VerifierCircuit,
    acceptance_prob,
    all_reject_verifier,
    amplify_verifier,
    analytic_bounds,
    build_family,
    build_reduction,
    build_reduction_circuit,
    build_resource,
    equality_verifier,
    me_prep_circuit,
    rotation_angle_for,
    rotation_verifier,
    witness_imprint_strategy,
)
from .universality import (
    PrecisionParams,
    SearchCapExceeded,
    StrategyDictionary,
    UnitaryFamily,
    Verdict,
    check_universality,
    distance_for_witness,
    evaluate_witness,
    fidelity_for_witness,
    strategy_search,
)
from .gates import (
    Circuit,
    Gate,
    MeasurementBranch,
    apply_circuit,
    apply_gate,
    circuit_to_unitary,
    equatorial_basis,
    measure_in_basis,
)
from .states import (
    DensityOp,
    InvariantViolation,
    Ket,
    fidelity_with_pure,
    mixture_density,
    partial_trace,
    pure_density,
    tensor,
    trace_distance,
)

__version__ = "0.1.0"
