"""Certifying recognition of digraphs with a min ordering (bi-arc digraphs)."""

from .digraph import (
    B,
    CkLabeling,
    CommonPreimage,
    Digraph,
    Direction,
    F,
    Side,
    Walk,
    avoids,
    ck_labeling,
    common_preimage,
    find_unbalanced_cycle,
    is_congruent,
    is_constricted,
    net_length,
    parse_digraph,
    prefix_net_lengths,
    weak_components,
)
from .errors import BiarcError, ContractViolation, DigraphParseError, InternalError, SizeGuardError
from .obstruction import Circuit, find_component_circuit, find_invertible_pair, verify_circuit
from .oracles import oracle_search
from .ordering import (
    DecisionState,
    KMinResult,
    RecognitionResult,
    build_k_min_ordering,
    build_min_ordering,
    extremal_pairs,
    find_source,
    find_transitive_source,
    verify_k_min_ordering,
    verify_min_ordering,
)
from .pairs import PairDigraph, SccInfo, build_pair_digraph, check_skew, strong_components
from .polymorphisms import (
    BinaryTable,
    SetTable,
    build_cc_polymorphism,
    min_to_set_polymorphism,
    verify_cc_polymorphism,
    verify_set_polymorphism,
)
from .representation import ArcRepresentation, build_arc_representation, verify_arc_representation

__version__ = "0.1.0"
