"""Cayley graphs of finite abelian groups: construction, CI/DCI testing and structural checks."""

from .cayley import CayleyDigraph, Digraph, bipartite_double_cover, build_digraph, reverse
from .citest import CiVerdict, is_ci_graph_definitional, is_ci_group, is_ci_via_babai, is_dci_digraph_definitional
from .groups import (
    ConnectionSet,
    FiniteAbelianGroup,
    GroupAutomorphism,
    GroupElement,
    InfeasibleError,
    enumerate_automorphisms,
    make_group,
)
from .hat import (
    HatConstruction,
    HypothesisReport,
    build_hat,
    build_non_ci_witness,
    check_hypotheses,
    spiga_connection_set,
)
from .isocanon import are_isomorphic, automorphism_group, canonical_form
from .perm import Permutation, PermutationGroup

__version__ = "0.1.0"

__all__ = [
    "CayleyDigraph",
    "CiVerdict",
    "ConnectionSet",
    "Digraph",
    "FiniteAbelianGroup",
    "GroupAutomorphism",
    "GroupElement",
    "HatConstruction",
    "HypothesisReport",
    "InfeasibleError",
    "Permutation",
    "PermutationGroup",
    "are_isomorphic",
    "automorphism_group",
    "bipartite_double_cover",
    "build_digraph",
    "build_hat",
    "build_non_ci_witness",
    "canonical_form",
    "check_hypotheses",
    "enumerate_automorphisms",
    "is_ci_graph_definitional",
    "is_ci_group",
    "is_ci_via_babai",
    "is_dci_digraph_definitional",
    "make_group",
    "reverse",
    "spiga_connection_set",
]
