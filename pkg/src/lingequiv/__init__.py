"""Distributional equivalence of linear non-Gaussian latent-variable
causal models: ranks, matroid machinery, class traversal, and recovery."""

from .digraph import (
    Digraph,
    SupportMatrix,
    VertexId,
    cycle_reversal,
    enumerate_disjoint_cycle_sets,
    simple_cycles,
    support_matrix,
)
from .equivalence import (
    ChildrenBases,
    EquivalenceClass,
    Presentation,
    Transition,
    TraversalBudget,
    can_add_edge,
    can_delete_edge,
    check_equivalent,
    children_bases,
    presentation,
    traverse_class,
)
from .errors import (
    BudgetExceededError,
    GraphFormatError,
    InfeasibleOracleError,
    InvalidCycleError,
    InvalidVertexError,
    LingEquivError,
    NotAMatroidError,
    NotTransversalError,
    SingularModelError,
    SizeCapError,
)
from .matroid import (
    AlphaSystem,
    MatroidFamilies,
    TransversalMatroid,
    alpha_system,
    colaug,
    colaug_hasse_neighbors,
    colaug_maximal,
    colaug_minimal,
    families,
    realize_from_bases,
    verify_family_axioms,
)
from .mixing import (
    MixingMatrix,
    WeightedModel,
    fullrank_confidence,
    mixing,
    numeric_rank,
    sample_data,
    sample_weights,
    scramble,
)
from .ranks import RankQuery, duality_gap, edge_rank, matching_rank, min_vertex_cut, path_rank
from .recovery import (
    ExactGraphOracle,
    NumericMixingOracle,
    RecoveryOptions,
    RecoveryResult,
    recover,
    recover_from_mixing,
    repair_noisy_families,
)
from .reduction import ReductionReport, is_irreducible, reduce
from .census import CensusRow, brute_force_partition, census

__version__ = "0.1.0"
