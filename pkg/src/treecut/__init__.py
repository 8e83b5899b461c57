"""treecut: vertex multicut on trees via penalty QUBO encodings.

The package builds tree instances of the restricted vertex multicut
problem, encodes them as QUBO/Ising models (both the plain penalty form
and the slack-corrected form), solves them with simulated annealing and
exact references, simulates a minor-embedding hardware pipeline, and
benchmarks the whole workflow.
"""

from .bench import (
    CSV_COLUMNS,
    DEFAULT_SUITE,
    ExperimentSpec,
    MetricsRecord,
    canonical_csv_bytes,
    default_experiment_spec,
    emit_report,
    feasibility_rate,
    load_experiment_spec,
    optimality_gap,
    parse_experiment_spec,
    records_from_json,
    records_to_csv,
    records_to_json,
    run_suite,
    save_experiment_spec,
    serialize_experiment_spec,
    spearman,
    strip_timing_columns,
    validate_experiment_spec,
)
from .embedding import (
    ChainStats,
    EmbeddedIsing,
    Embedding,
    EmbeddingVerdict,
    HardwareGraph,
    chimera_graph,
    embed_ising,
    embedding_overhead,
    find_embedding,
    load_embedding,
    load_hardware_graph,
    parse_embedding,
    save_embedding,
    save_hardware_graph,
    serialize_embedding,
    unembed,
    uniform_torque_chain_strength,
    validate_embedding,
)
from .errors import (
    EmbeddingError,
    GenerationError,
    InfeasibleInstanceError,
    InstanceError,
    ParameterError,
    ParseError,
    SearchBudgetError,
    SizeLimitError,
    TreecutError,
)
from .instance import (
    TreeInstance,
    TreePath,
    enumerate_constraint_paths,
    generate_tree_instance,
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
    terminal_vertices,
    unique_path,
    validate_instance,
)
from .qubo import (
    Cutset,
    FeasibilityVerdict,
    IsingModel,
    Qubo,
    build_penalty_qubo,
    build_slack_qubo,
    check_feasibility,
    default_penalties,
    extract_cutset,
    ising_energy,
    load_qubo,
    parse_qubo,
    qubo_energy,
    save_qubo,
    serialize_labels,
    serialize_qubo,
    to_ising,
)
from .solvers import (
    GridRow,
    SaConfig,
    SampleRecord,
    SampleSet,
    SaSchedule,
    SolverConfig,
    canonical_sampleset_bytes,
    exact_bruteforce,
    exact_multicut_bnb,
    grid_search_penalties,
    load_sampleset,
    parse_sampleset,
    racing_solve,
    sampleset_as_binary,
    sampleset_cut_metrics,
    save_sampleset,
    serialize_sampleset,
    simulated_annealing,
)

__version__ = "0.1.0"
