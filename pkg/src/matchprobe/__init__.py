"""Stable matching when one side's preferences must be queried."""
from .knowledge import CertTarget, KnowledgeState, certifies_b_optimal, certifies_semantic, certifies_stable
from .model import (
    AgentId,
    Instance,
    Matching,
    PreferenceProfile,
    Realization,
    Side,
    a_optimal_matching,
    b_optimal_matching,
    is_stable,
    stable_matchings,
)
from .oracles import Oracle, Query, QueryModel, RealizationSource

__all__ = [
    "AgentId",
    "CertTarget",
    "Instance",
    "KnowledgeState",
    "Matching",
    "Oracle",
    "PreferenceProfile",
    "Query",
    "QueryModel",
    "Realization",
    "RealizationSource",
    "Side",
    "a_optimal_matching",
    "b_optimal_matching",
    "certifies_b_optimal",
    "certifies_semantic",
    "certifies_stable",
    "is_stable",
    "stable_matchings",
]

__version__ = "0.1.0"
