"""Offline evaluation: leave-n-out split, ranking metrics, coverage and latency."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import __version__
from .recommender import RecommenderProfile, recommend
from .store import InteractionStore, StoreLike, ValidationError, as_snapshot

LATENCY_FIELDS = ("latency_mean_ms", "latency_std_ms")


@dataclass
class SplitResult:
    train: InteractionStore
    test: dict[int, frozenset[int]]
    seed: int


def split(store: StoreLike, min_interactions: int = 11, holdout: int = 10, seed: int = 0) -> SplitResult:
    """Hold out ``holdout`` random items of every user with at least ``min_interactions``.

    Users below the threshold keep their whole history in the training store.
    """
    if holdout < 1:
        raise ValidationError("holdout must be >= 1")
    if holdout >= min_interactions:
        raise ValidationError(
            f"holdout ({holdout}) must be smaller than min_interactions ({min_interactions}) "
            "so every test user keeps a training item"
        )
    snap = as_snapshot(store)
    rng = np.random.default_rng(seed)
    keep = np.ones(snap.num_interactions, dtype=bool)
    test: dict[int, frozenset[int]] = {}
    for user in snap.users().tolist():
        lo, hi = int(snap.user_ptr[user]), int(snap.user_ptr[user + 1])
        if hi - lo < min_interactions:
            continue
        picked = rng.choice(hi - lo, size=holdout, replace=False) + lo
        keep[picked] = False
        test[user] = frozenset(snap.user_items[picked].tolist())
    users = np.repeat(np.arange(snap.user_capacity), snap.user_degree)[keep]
    train = InteractionStore.from_triples(
        zip(users.tolist(), snap.user_items[keep].tolist(), snap.user_weights[keep].tolist())
    )
    return SplitResult(train, test, seed)


def _hits(recommended: Sequence[int], relevant, k: int) -> int:
    return sum(1 for item in list(recommended)[:k] if item in relevant)


def precision_at(recommended: Sequence[int], relevant, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return _hits(recommended, relevant, k) / k


def recall_at(recommended: Sequence[int], relevant, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise ValueError("recall is undefined for an empty relevant set")
    return _hits(recommended, relevant, k) / len(relevant)


def ndcg_at(recommended: Sequence[int], relevant, k: int) -> float:
    """Binary-relevance nDCG with a log2(position + 1) discount."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise ValueError("nDCG is undefined for an empty relevant set")
    dcg = sum(
        1.0 / math.log2(pos + 1)
        for pos, item in enumerate(list(recommended)[:k], start=1)
        if item in relevant
    )
    idcg = sum(1.0 / math.log2(pos + 1) for pos in range(1, min(k, len(relevant)) + 1))
    return dcg / idcg


@dataclass
class UserRecord:
    user: int
    latency_ms: float
    covered: bool
    precision: float
    recall: float
    ndcg: float
    ndcg_curve: list[float]


@dataclass
class ProfileReport:
    profile: str
    k: int
    test_user_count: int
    user_coverage: float
    precision_at_k: float
    recall_at_k: float
    ndcg_at_k: float
    precision_at_k_normalized: Optional[float]
    recall_at_k_normalized: Optional[float]
    ndcg_at_k_normalized: Optional[float]
    latency_mean_ms: float
    latency_std_ms: float
    # plain nDCG@1..k, the data behind an nDCG-vs-k plot
    ndcg_curve: list[float] = field(default_factory=list)
    ndcg_curve_normalized: Optional[list[float]] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _evaluate_user(train, user: int, relevant: frozenset, profile, k: int) -> UserRecord:
    start = time.perf_counter_ns()
    recs = recommend(train, user, profile, k)
    elapsed = (time.perf_counter_ns() - start) / 1e6
    ids = recs.ids.tolist()
    return UserRecord(
        user=user,
        latency_ms=elapsed,
        covered=bool(ids),
        precision=precision_at(ids, relevant, k),
        recall=recall_at(ids, relevant, k),
        ndcg=ndcg_at(ids, relevant, k),
        ndcg_curve=[ndcg_at(ids, relevant, c) for c in range(1, k + 1)],
    )


def user_records(
    train: StoreLike,
    test: Mapping[int, frozenset],
    profile: RecommenderProfile,
    k: int,
    parallelism: int = 1,
) -> list[UserRecord]:
    """One timed recommendation per test user, in ascending user order."""
    snap = as_snapshot(train)
    users = sorted(test)
    if parallelism <= 1:
        return [_evaluate_user(snap, u, test[u], profile, k) for u in users]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(lambda u: _evaluate_user(snap, u, test[u], profile, k), users))


def aggregate(records: Sequence[UserRecord], profile_name: str, k: int) -> ProfileReport:
    n = len(records)
    if not n:
        raise ValidationError("no test users to evaluate")
    covered = sum(r.covered for r in records)
    coverage = covered / n

    def plain(values: Iterable[float]) -> float:
        return math.fsum(values) / n

    def normalized(value: float) -> Optional[float]:
        return value / coverage if covered else None

    p = plain(r.precision for r in records)
    r_ = plain(r.recall for r in records)
    g = plain(r.ndcg for r in records)
    curve = [plain(rec.ndcg_curve[c] for rec in records) for c in range(k)]
    lat = np.array([r.latency_ms for r in records])
    return ProfileReport(
        profile=profile_name,
        k=k,
        test_user_count=n,
        user_coverage=coverage,
        precision_at_k=p,
        recall_at_k=r_,
        ndcg_at_k=g,
        precision_at_k_normalized=normalized(p),
        recall_at_k_normalized=normalized(r_),
        ndcg_at_k_normalized=normalized(g),
        latency_mean_ms=float(lat.mean()),
        latency_std_ms=float(lat.std()),
        ndcg_curve=curve,
        ndcg_curve_normalized=[normalized(v) for v in curve] if covered else None,
    )


def evaluate(
    train: StoreLike,
    test: Mapping[int, frozenset],
    profile: RecommenderProfile,
    k: int = 10,
    parallelism: int = 1,
) -> ProfileReport:
    if k < 1:
        raise ValueError("k must be >= 1")
    return aggregate(user_records(train, test, profile, k, parallelism), profile.name, k)


def fingerprint(store: StoreLike) -> str:
    """SHA-256 over the sorted (user, item, weight) arrays."""
    snap = as_snapshot(store)
    h = hashlib.sha256()
    for arr in (snap.user_ptr, snap.user_items, snap.user_weights):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


@dataclass
class EvaluationReport:
    profiles: list[ProfileReport]
    metadata: dict

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "profiles": [p.to_dict() for p in self.profiles]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """One row per (profile, metric)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["profile", "metric", "value"])
        metrics = [
            "user_coverage", "precision_at_k", "recall_at_k", "ndcg_at_k",
            "precision_at_k_normalized", "recall_at_k_normalized", "ndcg_at_k_normalized",
            *LATENCY_FIELDS,
        ]
        for p in self.profiles:
            for m in metrics:
                value = getattr(p, m)
                writer.writerow([p.profile, m, "" if value is None else repr(value)])
        return buf.getvalue()

    def curve_csv(self) -> str:
        """One row per (profile, cutoff) with plain and coverage-normalized nDCG."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["profile", "k", "ndcg", "ndcg_normalized"])
        for p in self.profiles:
            for c, value in enumerate(p.ndcg_curve, start=1):
                norm = p.ndcg_curve_normalized[c - 1] if p.ndcg_curve_normalized else None
                writer.writerow([p.profile, c, repr(value), "" if norm is None else repr(norm)])
        return buf.getvalue()


def run_evaluation(
    store: StoreLike,
    profiles: Sequence[RecommenderProfile],
    k: int = 10,
    holdout: int = 10,
    min_interactions: int = 11,
    seed: int = 0,
    parallelism: int = 1,
) -> EvaluationReport:
    """Split once, then evaluate every profile on the same split."""
    result = split(store, min_interactions=min_interactions, holdout=holdout, seed=seed)
    train = result.train.snapshot()
    reports = [evaluate(train, result.test, p, k, parallelism) for p in profiles]
    metadata = {
        "seed": seed,
        "k": k,
        "holdout": holdout,
        "min_interactions": min_interactions,
        "parallelism": parallelism,
        "dataset_fingerprint": fingerprint(store),
        "num_users": train.num_users,
        "num_items": train.num_items,
        "num_train_interactions": train.num_interactions,
        "test_users": len(result.test),
        "facetrec_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    return EvaluationReport(reports, metadata)


def strip_latency(report: dict) -> dict:
    """Copy of a report dict with latency fields removed (for determinism checks)."""
    out = json.loads(json.dumps(report))
    for p in out["profiles"]:
        for f in LATENCY_FIELDS:
            p.pop(f, None)
    return out
