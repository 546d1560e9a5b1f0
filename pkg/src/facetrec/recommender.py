"""User-based collaborative filtering on top of the overlap prefilter.

An item's score for a target user is the sum of similarities of the selected
neighbors that consumed it.  Neighbors come either from the full neighborhood
(every user sharing an item) or from the top-N overlap candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .prefilter import overlap_counts, facet_top_n
from .store import StoreLike, as_snapshot


class ConfigurationError(ValueError):
    """Invalid or unknown recommender profile."""


class Algorithm(str, Enum):
    MOST_POPULAR = "most_popular"
    CF_FULL = "cf_full"
    CF_PREFILTERED = "cf_prefiltered"


class Similarity(str, Enum):
    COSINE_BINARY = "cosine_binary"
    JACCARD = "jaccard"
    OVERLAP_RAW = "overlap_raw"


class DataMode(str, Enum):
    IMPLICIT = "implicit"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class RecommenderProfile:
    name: str
    algorithm: Algorithm
    similarity: Similarity = Similarity.COSINE_BINARY
    candidate_budget_n: Optional[int] = None
    neighborhood_k: Optional[int] = None
    data_mode: DataMode = DataMode.IMPLICIT

    def __post_init__(self):
        object.__setattr__(self, "algorithm", _enum(Algorithm, self.algorithm, self.name, "algorithm"))
        object.__setattr__(self, "similarity", _enum(Similarity, self.similarity, self.name, "similarity"))
        object.__setattr__(self, "data_mode", _enum(DataMode, self.data_mode, self.name, "data_mode"))
        n, k = self.candidate_budget_n, self.neighborhood_k
        if self.algorithm is Algorithm.CF_PREFILTERED and n is None:
            raise ConfigurationError(f"profile {self.name!r}: cf_prefiltered requires candidate_budget_n")
        if n is not None and n < 1:
            raise ConfigurationError(f"profile {self.name!r}: candidate_budget_n must be >= 1")
        if k is not None and k < 1:
            raise ConfigurationError(f"profile {self.name!r}: neighborhood_k must be >= 1")
        if n is not None and k is not None and n < k:
            raise ConfigurationError(
                f"profile {self.name!r}: candidate_budget_n ({n}) < neighborhood_k ({k})"
            )

    @property
    def is_cf(self) -> bool:
        return self.algorithm is not Algorithm.MOST_POPULAR


def _enum(cls, value, profile: str, field: str):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ConfigurationError(
            f"profile {profile!r}: unknown {field} {value!r} (expected one of {choices})"
        ) from None


@dataclass(frozen=True)
class ScoredList:
    """Ids with scores, sorted by score desc then id asc."""

    ids: np.ndarray
    scores: np.ndarray

    @classmethod
    def empty(cls) -> ScoredList:
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    @classmethod
    def ranked(cls, ids: np.ndarray, scores: np.ndarray, limit: Optional[int] = None) -> ScoredList:
        order = np.lexsort((ids, -scores))
        if limit is not None:
            order = order[:limit]
        return cls(ids[order], scores[order])

    def head(self, k: int) -> ScoredList:
        return ScoredList(self.ids[:k], self.scores[:k])

    def to_list(self) -> list[tuple[int, float]]:
        return list(zip(self.ids.tolist(), self.scores.tolist()))

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.to_list())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoredList):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.scores, other.scores)


def _similarities(overlaps, deg_target, deg_others, metric: Similarity) -> np.ndarray:
    overlaps = np.asarray(overlaps, dtype=np.float64)
    if metric is Similarity.COSINE_BINARY:
        return overlaps / np.sqrt(float(deg_target) * np.asarray(deg_others, dtype=np.float64))
    if metric is Similarity.JACCARD:
        return overlaps / (deg_target + np.asarray(deg_others, dtype=np.float64) - overlaps)
    return overlaps


def similarity(store: StoreLike, u: int, v: int, metric=Similarity.COSINE_BINARY) -> float:
    """Similarity of two users' item sets under ``metric``; 0 if either is empty."""
    metric = Similarity(metric)
    snap = as_snapshot(store)
    a, b = snap.item_ids(u), snap.item_ids(v)
    if not len(a) or not len(b):
        return 0.0
    ov = len(np.intersect1d(a, b, assume_unique=True))
    return float(_similarities(np.array([ov]), len(a), np.array([len(b)]), metric)[0])


def select_neighbors(store: StoreLike, target: int, profile: RecommenderProfile) -> ScoredList:
    """Neighbors of ``target`` ranked by similarity (desc), ties by user id."""
    if not profile.is_cf:
        raise ConfigurationError(f"profile {profile.name!r} is not a CF profile")
    snap = as_snapshot(store)
    if profile.algorithm is Algorithm.CF_FULL:
        users, overlaps = overlap_counts(snap, target)
    else:
        cands = facet_top_n(snap, target, profile.candidate_budget_n)
        users, overlaps = cands.users, cands.overlaps
    if not len(users):
        return ScoredList.empty()
    sims = _similarities(overlaps, snap.degree(target), snap.user_degree[users], profile.similarity)
    keep = sims > 0
    return ScoredList.ranked(users[keep], sims[keep], profile.neighborhood_k)


def score_items(store: StoreLike, target: int, neighbors: ScoredList) -> ScoredList:
    """Sum neighbor similarities per item, skipping items the target already has."""
    snap = as_snapshot(store)
    users = np.asarray(neighbors.ids, dtype=np.int64)
    if not len(users) or not snap.item_capacity:
        return ScoredList.empty()
    starts = snap.user_ptr[users]
    lengths = snap.user_ptr[users + 1] - starts
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    items = snap.user_items[offsets + np.arange(int(lengths.sum()))]
    weights = np.repeat(np.asarray(neighbors.scores, dtype=np.float64), lengths)
    # a second count array tells "consumed" apart from "scored zero"
    scores = np.bincount(items, weights=weights, minlength=snap.item_capacity)
    hits = np.bincount(items, minlength=snap.item_capacity)
    hits[snap.item_ids(target)] = 0
    candidates = np.flatnonzero(hits)
    return ScoredList.ranked(candidates, scores[candidates])


def most_popular(store: StoreLike, target: int, k_items: int) -> ScoredList:
    """Items by number of distinct consumers, excluding the target's own items."""
    if k_items < 1:
        raise ValueError(f"k_items must be >= 1, got {k_items}")
    snap = as_snapshot(store)
    order = snap.popularity_order
    seen = snap.item_ids(target)
    # the target can hide at most len(seen) of the leading items
    head = order[: k_items + len(seen)]
    if len(seen):
        head = head[~np.isin(head, seen, assume_unique=True)]
    head = head[:k_items]
    return ScoredList(head, snap.item_degree[head].astype(np.float64))


def recommend(store: StoreLike, target: int, profile: RecommenderProfile, k_items: int) -> ScoredList:
    if k_items < 1:
        raise ValueError(f"k_items must be >= 1, got {k_items}")
    snap = as_snapshot(store)
    if profile.algorithm is Algorithm.MOST_POPULAR:
        return most_popular(snap, target, k_items)
    neighbors = select_neighbors(snap, target, profile)
    return score_items(snap, target, neighbors).head(k_items)


_INT_KEYS = ("candidate_budget_n", "neighborhood_k")
_KEYS = ("name", "algorithm", "similarity", "candidate_budget_n", "neighborhood_k", "data_mode")


def _build_profile(fields: dict[str, str], line: int) -> RecommenderProfile:
    label = fields.get("name", f"<block at line {line}>")
    if "name" not in fields:
        raise ConfigurationError(f"profile {label}: missing required field 'name'")
    if "algorithm" not in fields:
        raise ConfigurationError(f"profile {label!r}: missing required field 'algorithm'")
    kwargs: dict = dict(fields)
    for key in _INT_KEYS:
        if key in kwargs:
            try:
                kwargs[key] = int(kwargs[key])
            except ValueError:
                raise ConfigurationError(f"profile {label!r}: {key} must be an integer") from None
    return RecommenderProfile(**kwargs)


def load_profiles(source: str) -> list[RecommenderProfile]:
    """Parse blank-line separated ``key=value`` profile blocks."""
    profiles: list[RecommenderProfile] = []
    fields: dict[str, str] = {}
    start = 0
    for lineno, raw in enumerate(source.splitlines() + [""], start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if fields:
                profiles.append(_build_profile(fields, start))
                fields = {}
            continue
        if not fields:
            start = lineno
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        label = fields.get("name", f"<block at line {start}>")
        if not sep:
            raise ConfigurationError(f"profile {label}: line {lineno} is not key=value: {raw!r}")
        if key not in _KEYS:
            raise ConfigurationError(f"profile {label}: unknown key {key!r} on line {lineno}")
        if key in fields:
            raise ConfigurationError(f"profile {label}: duplicate key {key!r} on line {lineno}")
        fields[key] = value
    names = [p.name for p in profiles]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ConfigurationError(f"duplicate profile names: {sorted(dupes)}")
    return profiles


def find_profile(profiles: Iterable[RecommenderProfile], name: str) -> RecommenderProfile:
    for p in profiles:
        if p.name == name:
            return p
    raise ConfigurationError(f"unknown profile {name!r}")


TABLE2_PROFILES = """\
# Most popular baseline, full user-based CF, and CF over the top-N overlapping users
name=mp
algorithm=most_popular

name=cf_full
algorithm=cf_full
similarity=cosine_binary
""" + "".join(
    f"\nname=cf_ov{n}\nalgorithm=cf_prefiltered\nsimilarity=cosine_binary\ncandidate_budget_n={n}\n"
    for n in (20, 40, 60, 80, 100)
)


def table2_profiles() -> list[RecommenderProfile]:
    return load_profiles(TABLE2_PROFILES)
