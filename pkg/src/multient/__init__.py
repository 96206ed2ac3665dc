"""Construction, classification and quantification of entanglement in small
qubit registers."""

__version__ = "0.1.0"

from .core import (
    DensityOperator,
    EntanglementError,
    MeasurementRecord,
    NonConvergenceError,
    PureState,
    Split,
    bell_state,
    fidelity_pure,
    ghz_state,
    haar_random_pure,
    partial_trace,
    partial_transpose,
    plus_state,
    product_state,
    projective_measure_qubit,
    tensor_product,
    trace_norm,
    von_neumann_entropy,
    w_state,
)
from .normal_forms import (
    AcinForm,
    SchmidtForm2,
    SliceMatrices,
    acin_normal_form,
    lu_parameter_lower_bound,
    schmidt_decompose,
    slocc_parameter_lower_bound,
)
from .measures import (
    ConcurrenceWork,
    MeasureResult,
    concurrence_2q,
    entropy_of_entanglement,
    geometric_measure,
    global_entanglement,
    localizable_entanglement,
    relative_entropy_of_entanglement_ub,
    schmidt_measure,
    tangle,
)
from .classification import (
    SeparabilityReport,
    SloccClass,
    TensorRankBounds,
    classify_slocc_3q,
    enumerate_splits,
    separability_report,
    tensor_rank_bounds,
)
from .witnesses import (
    PauliDecomposition,
    Witness,
    custom_witness,
    evaluate,
    ghz_witness,
    pauli_decompose,
    w_witness,
)
from .stabilizer import (
    Graph,
    PauliString,
    StabilizerGroup,
    graph_generators,
    graph_state,
    pauli_commutes,
    pauli_multiply,
    schmidt_rank_across_cut,
    stabilizer_state,
)
from .metrology import (
    ProbeFamily4,
    RamseyConfig,
    UncertaintyReport,
    ghz_limit,
    optimize_probe,
    probe_state_4,
    quantum_fisher_information,
    ramsey_probability,
    shot_noise_limit,
)

__all__ = [
    "__version__",
    "DensityOperator",
    "EntanglementError",
    "MeasurementRecord",
    "NonConvergenceError",
    "PureState",
    "Split",
    "bell_state",
    "fidelity_pure",
    "ghz_state",
    "haar_random_pure",
    "partial_trace",
    "partial_transpose",
    "plus_state",
    "product_state",
    "projective_measure_qubit",
    "tensor_product",
    "trace_norm",
    "von_neumann_entropy",
    "w_state",
    "AcinForm",
    "SchmidtForm2",
    "SliceMatrices",
    "acin_normal_form",
    "lu_parameter_lower_bound",
    "schmidt_decompose",
    "slocc_parameter_lower_bound",
    "ConcurrenceWork",
    "MeasureResult",
    "concurrence_2q",
    "entropy_of_entanglement",
    "geometric_measure",
    "global_entanglement",
    "localizable_entanglement",
    "relative_entropy_of_entanglement_ub",
    "schmidt_measure",
    "tangle",
    "SeparabilityReport",
    "SloccClass",
    "TensorRankBounds",
    "classify_slocc_3q",
    "enumerate_splits",
    "separability_report",
    "tensor_rank_bounds",
    "PauliDecomposition",
    "Witness",
    "custom_witness",
    "evaluate",
    "ghz_witness",
    "pauli_decompose",
    "w_witness",
    "Graph",
    "PauliString",
    "StabilizerGroup",
    "graph_generators",
    "graph_state",
    "pauli_commutes",
    "pauli_multiply",
    "schmidt_rank_across_cut",
    "stabilizer_state",
    "ProbeFamily4",
    "RamseyConfig",
    "UncertaintyReport",
    "ghz_limit",
    "optimize_probe",
    "probe_state_4",
    "quantum_fisher_information",
    "ramsey_probability",
    "shot_noise_limit",
]
