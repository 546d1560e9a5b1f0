"""Greedy candidate-neighbor selection by overlap counting.

For a target user we walk the posting list of every item the target consumed
and count, per user, how many of those lists they appear on.  The count is
exactly the size of the intersection of both item sets, so the top-N users by
count are the N users with the largest overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .store import StoreLike, as_snapshot


@dataclass(frozen=True)
class CandidateSet:
    """Candidate neighbors of ``target`` sorted by overlap desc, then user id asc."""

    target: int
    users: np.ndarray
    overlaps: np.ndarray

    @property
    def entries(self) -> list[tuple[int, int]]:
        return list(zip(self.users.tolist(), self.overlaps.tolist()))

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.entries)


def _empty(target: int) -> CandidateSet:
    return CandidateSet(target, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))


def overlap_counts(snap, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(users, overlaps)`` for every user sharing an item with ``target``.

    Users come back in ascending id order; the target itself is excluded.
    """
    items = snap.item_ids(target)
    if not len(items):
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    starts = snap.item_ptr[items]
    ends = snap.item_ptr[items + 1]
    lengths = ends - starts
    total = int(lengths.sum())
    # gather all posting lists of the target's items in one shot
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    postings = snap.item_users[offsets + np.arange(total)]
    counts = np.bincount(postings, minlength=snap.user_capacity)
    counts[target] = 0
    users = np.flatnonzero(counts)
    return users, counts[users]


def _rank(users: np.ndarray, overlaps: np.ndarray, n: Optional[int]) -> np.ndarray:
    """Indices of the top-``n`` entries under (overlap desc, user asc)."""
    if n is not None and n < len(users):
        # single int64 key encodes the tie rule so partitioning stays exact
        span = int(users.max()) + 1
        key = overlaps * span + (span - 1 - users)
        top = np.argpartition(-key, n - 1)[:n]
        return top[np.argsort(-key[top])]
    return np.lexsort((users, -overlaps))


def facet_top_n(store: StoreLike, target: int, n: Optional[int]) -> CandidateSet:
    """Top-``n`` users by overlap with ``target``; ``n=None`` returns all of them."""
    if n is not None and n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    snap = as_snapshot(store)
    users, overlaps = overlap_counts(snap, target)
    if not len(users):
        return _empty(target)
    order = _rank(users, overlaps, n)
    return CandidateSet(target, users[order], overlaps[order])


def brute_force_overlap(store: StoreLike, target: int) -> dict[int, int]:
    """Overlap with every other user by direct pairwise set intersection.

    Deliberately avoids the inverted index; used as a test oracle.
    """
    snap = as_snapshot(store)
    mine = set(snap.item_ids(target).tolist())
    if not mine:
        return {}
    result = {}
    for user in snap.users().tolist():
        if user == target:
            continue
        ov = len(mine.intersection(snap.item_ids(user).tolist()))
        if ov:
            result[user] = ov
    return result


def neighborhood_size(store: StoreLike, target: int) -> int:
    """Number of distinct users sharing at least one item with ``target``."""
    return len(overlap_counts(as_snapshot(store), target)[0])
