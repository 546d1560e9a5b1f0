"""Seeded synthetic interaction data with heavy-tailed activity and Zipf popularity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .store import InteractionStore, ValidationError


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a synthetic user/item dataset.

    Per-user counts follow a discrete power law ``P(c) ~ c**-count_shape`` on
    ``[min_count, max_count]``; any ``count_shape > 0`` with ``max_count`` well
    above ``min_count`` gives a right-skewed count distribution (``count_shape=0``
    is uniform).  Items are drawn without replacement per user with probability
    proportional to ``rank**-popularity_exponent``.
    """

    num_users: int
    num_items: int
    min_count: int = 1
    max_count: int = 50
    count_shape: float = 1.5
    popularity_exponent: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("num_users", "num_items", "min_count", "max_count"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.min_count > self.max_count:
            raise ValidationError("min_count must not exceed max_count")
        if self.max_count > self.num_items:
            raise ValidationError(
                f"max_count ({self.max_count}) exceeds num_items ({self.num_items})"
            )
        if self.count_shape < 0 or self.popularity_exponent < 0:
            raise ValidationError("count_shape and popularity_exponent must be >= 0")


def draw_counts(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    support = np.arange(spec.min_count, spec.max_count + 1)
    p = support.astype(np.float64) ** -spec.count_shape
    return rng.choice(support, size=spec.num_users, p=p / p.sum())


def item_probabilities(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    ranks = np.arange(1, spec.num_items + 1, dtype=np.float64)
    p = ranks ** -spec.popularity_exponent
    # shuffle so popularity is not tied to item id order
    return rng.permutation(p / p.sum())


def synthetic_triples(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return parallel ``(users, items)`` arrays, grouped by user."""
    rng = np.random.default_rng(spec.seed)
    counts = draw_counts(spec, rng)
    p = item_probabilities(spec, rng)
    users = np.repeat(np.arange(spec.num_users), counts)
    items = np.empty(int(counts.sum()), dtype=np.int64)
    pos = 0
    for c in counts.tolist():
        items[pos:pos + c] = rng.choice(spec.num_items, size=c, replace=False, p=p)
        pos += c
    return users, items


def generate_synthetic(spec: SyntheticSpec) -> InteractionStore:
    users, items = synthetic_triples(spec)
    return InteractionStore.from_triples(zip(users.tolist(), items.tolist(), [None] * len(users)))
