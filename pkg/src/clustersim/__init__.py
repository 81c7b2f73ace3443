"""Statevector simulator for cluster-channel teleportation and state splitting."""

from .channels import (
    ClusterParams,
    OwnershipError,
    RegisterMap,
    SingleInput,
    TwoInput,
    compose_system,
    insert_listener,
    make_bell,
    make_cluster,
    maximal_cluster,
    qis_register,
    random_cluster_params,
    random_single_input,
    random_two_input,
    teleport_register,
)
from .core import (
    DensityMatrix,
    StateVector,
    apply_1q,
    apply_cnot,
    basis_state,
    density_from_state,
    fidelity_pure,
    fidelity_state_density,
    inner_product,
    mutual_information,
    partial_trace,
    permute_qubits,
    phase_aligned_distance,
    states_equal_up_to_phase,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .kernels import active_backend
from .measurement import (
    BellOutcome,
    PovmOutcome,
    PovmSet,
    PovmValidityError,
    bell_distribution,
    bsm_sample,
    construct_povm,
    povm_probabilities,
    povm_sample,
)
from .qis import (
    AccessReport,
    CorrectionWord,
    QisOutcomeKey,
    QisResult,
    Table1Report,
    access_structure_check,
    analytic_qis_outcome,
    projected_branch,
    run_qis,
    synthesize_correction,
    table1_lookup,
    verify_table1,
)
from .runtime import (
    ClassicalMessage,
    InMemoryTransport,
    NullTransport,
    PartyId,
    SeedStreams,
    Stage,
    Transcript,
    Transport,
    TransportError,
)
from .security import (
    AttackConfig,
    LeakageReport,
    SubstitutionReport,
    dishonest_bob_substitution,
    run_qis_with_eve,
    run_teleport_with_eve,
)
from .teleport import (
    BranchRecipe,
    TeleportResult,
    TrialPlan,
    analytic_post_bsm,
    branch_recipe,
    chika_recover,
    monte_carlo_success_frequency,
    per_trial_success_probability,
    povm_strength,
    psuc_closed_form,
    psuc_formula,
    run_teleport_once,
    run_teleport_with_retries,
    validate_plan,
)

__version__ = "0.1.0"

__all__ = [
    "AccessReport",
    "AttackConfig",
    "BellOutcome",
    "BranchRecipe",
    "ClassicalMessage",
    "ClusterParams",
    "CorrectionWord",
    "DensityMatrix",
    "InMemoryTransport",
    "LeakageReport",
    "NullTransport",
    "OwnershipError",
    "PartyId",
    "PovmOutcome",
    "PovmSet",
    "PovmValidityError",
    "QisOutcomeKey",
    "QisResult",
    "RegisterMap",
    "SeedStreams",
    "SingleInput",
    "Stage",
    "StateVector",
    "SubstitutionReport",
    "Table1Report",
    "TeleportResult",
    "Transcript",
    "Transport",
    "TransportError",
    "TrialPlan",
    "TwoInput",
    "access_structure_check",
    "active_backend",
    "analytic_post_bsm",
    "analytic_qis_outcome",
    "apply_1q",
    "apply_cnot",
    "basis_state",
    "bell_distribution",
    "branch_recipe",
    "bsm_sample",
    "chika_recover",
    "compose_system",
    "construct_povm",
    "density_from_state",
    "dishonest_bob_substitution",
    "fidelity_pure",
    "fidelity_state_density",
    "inner_product",
    "insert_listener",
    "make_bell",
    "make_cluster",
    "maximal_cluster",
    "monte_carlo_success_frequency",
    "mutual_information",
    "partial_trace",
    "per_trial_success_probability",
    "permute_qubits",
    "phase_aligned_distance",
    "povm_probabilities",
    "povm_sample",
    "povm_strength",
    "projected_branch",
    "psuc_closed_form",
    "psuc_formula",
    "qis_register",
    "random_cluster_params",
    "random_single_input",
    "random_two_input",
    "run_qis",
    "run_qis_with_eve",
    "run_teleport_once",
    "run_teleport_with_eve",
    "run_teleport_with_retries",
    "states_equal_up_to_phase",
    "synthesize_correction",
    "table1_lookup",
    "teleport_register",
    "tensor",
    "trace_distance",
    "validate_plan",
    "verify_table1",
    "von_neumann_entropy",
]
