"""User-based collaborative filtering with overlap-count neighbor prefiltering."""

__version__ = "0.1.0"

from .store import InteractionStore, Snapshot, ValidationError  # noqa: E402
from .prefilter import CandidateSet, brute_force_overlap, facet_top_n, neighborhood_size  # noqa: E402
from .recommender import (  # noqa: E402
    ConfigurationError,
    RecommenderProfile,
    ScoredList,
    load_profiles,
    most_popular,
    recommend,
    score_items,
    select_neighbors,
    similarity,
    table2_profiles,
)

__all__ = [
    "CandidateSet",
    "ConfigurationError",
    "InteractionStore",
    "RecommenderProfile",
    "ScoredList",
    "Snapshot",
    "ValidationError",
    "brute_force_overlap",
    "facet_top_n",
    "load_profiles",
    "most_popular",
    "neighborhood_size",
    "recommend",
    "score_items",
    "select_neighbors",
    "similarity",
    "table2_profiles",
]
