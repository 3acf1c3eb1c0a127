"""Bootstrap percolation of k-uniform extension hypergraphs.

A pattern process repeatedly inserts every absent k-set whose addition
completes a new copy of a fixed pattern; this package simulates such
processes for k-extensions of small graphs, measures their running times,
computes the structural diagnostics of the dynamics, and searches for
starting hypergraphs with extremal running time.
"""

from .diagnostics import (
    Center,
    CenterFamily,
    CheckResult,
    DiagnosticsConfig,
    EssentialRecord,
    ObservationReport,
    center_family,
    center_in_family,
    center_of,
    check_observations,
    classify_steps,
    d_match,
    essential_pairs,
    format_report,
    good_vertices,
    load_diagnostics_config,
    parse_diagnostics_config,
    replace_vertex,
    trace_pair_sets,
)
from .embedding import (
    CopyWitness,
    Frontier,
    brute_force_frontier,
    count_copies_oracle,
    creates_new_copy,
    enumerate_extension_embeddings,
    frontier,
    oracle_creates_new_copy,
)
from .hypergraph import (
    BudgetError,
    Hypergraph,
    KSet,
    are_isomorphic,
    canonical_code,
    complete_hypergraph,
    dump_hg1,
    format_hg1,
    load_hg1,
    make_hypergraph,
    max_disjoint_sets,
    parse_hg1,
)
from .patterns import (
    ExtensionPattern,
    PatternGraph,
    PatternStats,
    clique_pattern,
    cycle_pattern,
    extend,
    named_pattern,
    path_pattern,
    pattern_from_hg1,
    pattern_stats,
    resolve_pattern,
    star_pattern,
)
from .process import (
    StepRecord,
    Trace,
    check_trace_invariants,
    pattern_key,
    read_trace_jsonl,
    run,
    running_time,
    step,
    trace_from_jsonl,
    trace_to_csv,
    trace_to_jsonl,
    write_trace_csv,
    write_trace_jsonl,
)
from .search import (
    SearchResult,
    canonical_start_masks,
    exhaustive_max,
    local_search_max,
    random_hypergraph,
    star_construction,
    star_construction_min_n,
    star_hubs,
)

__version__ = "0.1.0"
