"""Envy-free matching reforms in the house allocation model.

Agents hold one item each and may trade up to a strictly better unassigned
item whenever doing so keeps the matching envy-free.  Running such exchanges
to exhaustion always lands in the same terminal matching; this package
computes that matching, finds shortest exchange schedules to it, decides
reachability of arbitrary targets, and generates benchmark families with
known schedule lengths.
"""

from .engine import (
    NominationPolicy,
    PreprocessReport,
    VerifyReport,
    best_first,
    compute_reformist,
    fixed_order,
    is_reachable,
    preprocess,
    random_policy,
    round_robin,
    verify_sequence,
)
from .errors import (
    BudgetExceededError,
    FileFormatError,
    GenerationError,
    InternalInvariantError,
    ReformistError,
    StepError,
    ValidationError,
)
from .fileio import (
    dumps_instance,
    dumps_sequence,
    export_dot,
    load_graph,
    load_instance,
    load_sequence,
    loads_graph,
    loads_instance,
    loads_sequence,
    parse_edge_list,
    save_instance,
    save_sequence,
    sha256_text,
)
from .generators import (
    ReductionCertificate,
    clique_sequence,
    gen_exponential_gap,
    gen_multicolored_clique,
    gen_random,
    gen_set_cover,
    gen_vertex_cover,
    set_cover_sequence,
    vertex_cover_sequence,
)
from .model import (
    ExchangeStep,
    Instance,
    ItemGraph,
    Matching,
    ReformSequence,
    apply_exchange,
    best_feasible_item,
    build_item_graph,
    check_instance,
    check_matching,
    envy_pairs,
    feasible_exchanges,
    is_envy_free,
    validate_instance,
    validate_matching,
)
from .solvers import (
    GeneralizedInstance,
    SolveOptions,
    SolveResult,
    bfs_shortest,
    fpt_by_intermediate,
    fpt_by_length,
    generalized_envy_pairs,
    is_satisfactory,
    reachable_matchings,
    shortest_deg3,
    shortest_two_acceptor,
    solve_auto,
    solve_general_LN,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ExchangeStep",
    "FileFormatError",
    "GeneralizedInstance",
    "GenerationError",
    "Instance",
    "InternalInvariantError",
    "ItemGraph",
    "Matching",
    "NominationPolicy",
    "PreprocessReport",
    "ReductionCertificate",
    "ReformSequence",
    "ReformistError",
    "SolveOptions",
    "SolveResult",
    "StepError",
    "ValidationError",
    "VerifyReport",
    "apply_exchange",
    "best_feasible_item",
    "best_first",
    "bfs_shortest",
    "build_item_graph",
    "check_instance",
    "check_matching",
    "clique_sequence",
    "compute_reformist",
    "dumps_instance",
    "dumps_sequence",
    "envy_pairs",
    "export_dot",
    "feasible_exchanges",
    "fixed_order",
    "fpt_by_intermediate",
    "fpt_by_length",
    "gen_exponential_gap",
    "gen_multicolored_clique",
    "gen_random",
    "gen_set_cover",
    "gen_vertex_cover",
    "generalized_envy_pairs",
    "is_envy_free",
    "is_reachable",
    "is_satisfactory",
    "load_graph",
    "load_instance",
    "load_sequence",
    "loads_graph",
    "loads_instance",
    "loads_sequence",
    "parse_edge_list",
    "preprocess",
    "random_policy",
    "reachable_matchings",
    "round_robin",
    "save_instance",
    "save_sequence",
    "set_cover_sequence",
    "sha256_text",
    "shortest_deg3",
    "shortest_two_acceptor",
    "solve_auto",
    "solve_general_LN",
    "validate_instance",
    "validate_matching",
    "verify_sequence",
    "vertex_cover_sequence",
]
