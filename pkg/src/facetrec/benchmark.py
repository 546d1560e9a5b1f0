"""Latency comparison of full user-based CF against overlap-prefiltered CF."""

from __future__ import annotations

import gc
import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .prefilter import neighborhood_size
from .recommender import Algorithm, RecommenderProfile, recommend
from .stats import dataset_stats
from .store import StoreLike, as_snapshot
from .synthetic import SyntheticSpec

# right-skewed per-user counts on a store where popular items connect most users
DEFAULT_BENCH_SPEC = SyntheticSpec(
    num_users=20_000,
    num_items=5_000,
    min_count=2,
    max_count=300,
    count_shape=1.2,
    popularity_exponent=0.8,
    seed=7,
)


@dataclass
class LatencyStats:
    profile: str
    candidate_budget_n: Optional[int]
    mean_ms: float
    std_ms: float
    median_ms: float
    p95_ms: float


def bench_profiles(budgets: Sequence[int] = (20, 40, 60, 80, 100)) -> list[RecommenderProfile]:
    profiles = [RecommenderProfile("cf_full", Algorithm.CF_FULL)]
    profiles += [
        RecommenderProfile(f"cf_ov{n}", Algorithm.CF_PREFILTERED, candidate_budget_n=n)
        for n in budgets
    ]
    return profiles


def sample_targets(store: StoreLike, sample: int, min_interactions: int, seed: int) -> np.ndarray:
    snap = as_snapshot(store)
    users = snap.users()
    eligible = users[snap.user_degree[users] >= min_interactions]
    if sample >= len(eligible):
        return eligible
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(eligible, size=sample, replace=False))


def time_profiles(
    store: StoreLike,
    profiles: Sequence[RecommenderProfile],
    targets: Sequence[int],
    k_items: int = 10,
    repeats: int = 1,
) -> list[LatencyStats]:
    """Time every profile on every target.

    Profiles are interleaved per target so slow drift in machine load hits
    all of them alike.
    """
    snap = as_snapshot(store)
    samples = [[] for _ in profiles]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            for user in targets:
                user = int(user)
                for j, profile in enumerate(profiles):
                    start = time.perf_counter_ns()
                    recommend(snap, user, profile, k_items)
                    samples[j].append((time.perf_counter_ns() - start) / 1e6)
    finally:
        if gc_was_enabled:
            gc.enable()
    out = []
    for profile, s in zip(profiles, samples):
        arr = np.array(s)
        out.append(LatencyStats(
            profile=profile.name,
            candidate_budget_n=profile.candidate_budget_n,
            mean_ms=float(arr.mean()),
            std_ms=float(arr.std()),
            median_ms=float(np.median(arr)),
            p95_ms=float(np.percentile(arr, 95)),
        ))
    return out


def run_bench(
    store: StoreLike,
    budgets: Sequence[int] = (20, 40, 60, 80, 100),
    sample: int = 500,
    min_interactions: int = 11,
    k_items: int = 10,
    repeats: int = 1,
    seed: int = 0,
) -> dict:
    snap = as_snapshot(store)
    targets = sample_targets(snap, sample, min_interactions, seed)
    profiles = bench_profiles(budgets)
    # warm caches (popularity order, numpy dispatch) outside the timed loop
    for profile in profiles:
        recommend(snap, int(targets[0]), profile, k_items)
    stats = time_profiles(snap, profiles, targets, k_items, repeats)
    sizes = np.array([neighborhood_size(snap, int(u)) for u in targets])
    full = stats[0].mean_ms
    return {
        "dataset": dataset_stats(snap).to_dict(),
        "targets": len(targets),
        "neighborhood_size": {
            "mean": float(sizes.mean()),
            "median": float(np.median(sizes)),
            "max": int(sizes.max()),
        },
        "latency": [asdict(s) for s in stats],
        "speedup_vs_full": {s.profile: full / s.mean_ms for s in stats[1:]},
    }
