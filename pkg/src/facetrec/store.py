"""Dual-indexed user/item interaction storage.

`InteractionStore` is the mutable, thread-safe ingestion side. Readers work on
`Snapshot` objects: immutable CSR-style arrays holding both the forward
(user -> items) and inverted (item -> users) views.  A snapshot is cached until
the next write, so repeated reads between writes are free.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

import numpy as np


class ValidationError(ValueError):
    """Raised for inputs violating a data contract."""


class ReadWriteLock:
    """Many concurrent readers or one exclusive writer.

    Writers are preferred: once a writer is waiting, new readers queue behind it.
    """

    def __init__(self) -> None:
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    @contextmanager
    def read(self) -> Iterator[None]:
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if not self._readers:
                    self._cond.notify_all()

    @contextmanager
    def write(self) -> Iterator[None]:
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


def _check_id(value: int, kind: str) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{kind} id must be an integer, got {value!r}")
    if value < 0:
        raise ValidationError(f"{kind} id must be non-negative, got {value}")
    return int(value)


class InteractionStore:
    """Mutable interaction store with forward and inverted views.

    Identifiers are non-negative integers and are expected to be dense (the
    ingestion layer assigns them sequentially); array sizes in snapshots scale
    with the largest identifier seen.

    Implicit events are stored with weight 1.0.  Re-adding an existing
    (user, item) pair overwrites its weight.
    """

    def __init__(self) -> None:
        self._forward: dict[int, dict[int, float]] = {}
        self._inverted: dict[int, dict[int, float]] = {}
        self._num_interactions = 0
        self._lock = ReadWriteLock()
        self._version = 0
        self._cached: Optional[Snapshot] = None
        self._cached_version = -1

    def add_interaction(self, user: int, item: int, weight: Optional[float] = None) -> None:
        user = _check_id(user, "user")
        item = _check_id(item, "item")
        if weight is None:
            weight = 1.0
        else:
            weight = float(weight)
            if not math.isfinite(weight) or weight < 0:
                raise ValidationError(f"weight must be finite and >= 0, got {weight}")
        with self._lock.write():
            items = self._forward.setdefault(user, {})
            if item not in items:
                self._num_interactions += 1
            items[item] = weight
            self._inverted.setdefault(item, {})[user] = weight
            self._version += 1

    def extend(self, triples: Iterable[tuple[int, int, Optional[float]]]) -> int:
        """Bulk :meth:`add_interaction` under a single write lock; returns rows seen.

        Every row is validated before any is applied.
        """
        rows = []
        for user, item, weight in triples:
            user, item = _check_id(user, "user"), _check_id(item, "item")
            weight = 1.0 if weight is None else float(weight)
            if not math.isfinite(weight) or weight < 0:
                raise ValidationError(f"weight must be finite and >= 0, got {weight}")
            rows.append((user, item, weight))
        with self._lock.write():
            forward, inverted = self._forward, self._inverted
            for user, item, weight in rows:
                items = forward.get(user)
                if items is None:
                    items = forward[user] = {}
                if item not in items:
                    self._num_interactions += 1
                items[item] = weight
                posting = inverted.get(item)
                if posting is None:
                    posting = inverted[item] = {}
                posting[user] = weight
            self._version += 1
        return len(rows)

    def items_of(self, user: int) -> list[tuple[int, float]]:
        with self._lock.read():
            return sorted(self._forward.get(user, {}).items())

    def users_of(self, item: int) -> list[tuple[int, float]]:
        with self._lock.read():
            return sorted(self._inverted.get(item, {}).items())

    @property
    def num_users(self) -> int:
        return len(self._forward)

    @property
    def num_items(self) -> int:
        return len(self._inverted)

    @property
    def num_interactions(self) -> int:
        return self._num_interactions

    @property
    def version(self) -> int:
        return self._version

    def snapshot(self) -> Snapshot:
        """Return an immutable view of every interaction added so far."""
        with self._lock.read():
            if self._cached is not None and self._cached_version == self._version:
                return self._cached
            version = self._version
            users, items, weights = [], [], []
            for u, row in self._forward.items():
                for i, w in row.items():
                    users.append(u)
                    items.append(i)
                    weights.append(w)
            snap = Snapshot.from_triples(
                np.asarray(users, dtype=np.int64),
                np.asarray(items, dtype=np.int64),
                np.asarray(weights, dtype=np.float64),
            )
        # benign race: two readers may both build; either result is valid
        self._cached, self._cached_version = snap, version
        return snap

    def triples(self) -> Iterator[tuple[int, int, float]]:
        for u, i, w in self.snapshot().triples():
            yield u, i, w

    @classmethod
    def from_triples(cls, triples) -> InteractionStore:
        store = cls()
        store.extend(triples)
        return store


def _csr(keys: np.ndarray, vals: np.ndarray, weights: np.ndarray, size: int):
    order = np.lexsort((vals, keys))
    indptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=size), out=indptr[1:])
    return indptr, vals[order].copy(), weights[order].copy()


class Snapshot:
    """Read-only interaction view backed by two CSR arrays.

    Rows of both views are sorted by ascending identifier.
    """

    def __init__(self, user_ptr, user_items, user_weights, item_ptr, item_users, item_weights):
        self.user_ptr = user_ptr
        self.user_items = user_items
        self.user_weights = user_weights
        self.item_ptr = item_ptr
        self.item_users = item_users
        self.item_weights = item_weights
        for arr in (user_ptr, user_items, user_weights, item_ptr, item_users, item_weights):
            arr.setflags(write=False)
        self.user_degree = np.diff(user_ptr)
        self.item_degree = np.diff(item_ptr)
        self.user_degree.setflags(write=False)
        self.item_degree.setflags(write=False)

    @classmethod
    def from_triples(cls, users: np.ndarray, items: np.ndarray, weights: np.ndarray) -> Snapshot:
        n_users = int(users.max()) + 1 if users.size else 0
        n_items = int(items.max()) + 1 if items.size else 0
        uptr, uitems, uw = _csr(users, items, weights, n_users)
        iptr, iusers, iw = _csr(items, users, weights, n_items)
        return cls(uptr, uitems, uw, iptr, iusers, iw)

    def snapshot(self) -> Snapshot:
        return self

    # id space bounds (one past the largest id)
    @property
    def user_capacity(self) -> int:
        return len(self.user_ptr) - 1

    @property
    def item_capacity(self) -> int:
        return len(self.item_ptr) - 1

    @cached_property
    def num_users(self) -> int:
        return int(np.count_nonzero(self.user_degree))

    @cached_property
    def num_items(self) -> int:
        return int(np.count_nonzero(self.item_degree))

    @property
    def num_interactions(self) -> int:
        return len(self.user_items)

    def item_ids(self, user: int) -> np.ndarray:
        """Sorted item ids of ``user`` (empty for unknown users)."""
        if not 0 <= user < self.user_capacity:
            return self.user_items[:0]
        return self.user_items[self.user_ptr[user]:self.user_ptr[user + 1]]

    def user_ids(self, item: int) -> np.ndarray:
        if not 0 <= item < self.item_capacity:
            return self.item_users[:0]
        return self.item_users[self.item_ptr[item]:self.item_ptr[item + 1]]

    def degree(self, user: int) -> int:
        if not 0 <= user < self.user_capacity:
            return 0
        return int(self.user_degree[user])

    def items_of(self, user: int) -> list[tuple[int, float]]:
        if not 0 <= user < self.user_capacity:
            return []
        lo, hi = self.user_ptr[user], self.user_ptr[user + 1]
        return list(zip(self.user_items[lo:hi].tolist(), self.user_weights[lo:hi].tolist()))

    def users_of(self, item: int) -> list[tuple[int, float]]:
        if not 0 <= item < self.item_capacity:
            return []
        lo, hi = self.item_ptr[item], self.item_ptr[item + 1]
        return list(zip(self.item_users[lo:hi].tolist(), self.item_weights[lo:hi].tolist()))

    def users(self) -> np.ndarray:
        """Ids of users with a non-empty history, ascending."""
        return np.flatnonzero(self.user_degree)

    def items(self) -> np.ndarray:
        return np.flatnonzero(self.item_degree)

    def triples(self) -> Iterator[tuple[int, int, float]]:
        users = np.repeat(np.arange(self.user_capacity), self.user_degree)
        yield from zip(users.tolist(), self.user_items.tolist(), self.user_weights.tolist())

    @cached_property
    def popularity_order(self) -> np.ndarray:
        """Item ids by distinct-user count descending, ties by ascending id."""
        items = self.items()
        counts = self.item_degree[items]
        return items[np.lexsort((items, -counts))]


StoreLike = Union[InteractionStore, Snapshot]


def as_snapshot(store: StoreLike) -> Snapshot:
    return store.snapshot()
