"""Descriptive statistics of per-user interaction counts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .store import StoreLike, as_snapshot


class StatisticsError(ValueError):
    pass


class Moments(NamedTuple):
    mean: float
    std: float
    skewness: float
    kurtosis: float


@dataclass(frozen=True)
class DatasetStats:
    density: float
    mean: float
    std: float
    skewness: float
    kurtosis: float
    num_users: int
    num_items: int
    num_interactions: int

    def to_dict(self) -> dict:
        return asdict(self)


def density(store: StoreLike) -> float:
    snap = as_snapshot(store)
    if not snap.num_users or not snap.num_items:
        raise StatisticsError("density is undefined for an empty store")
    return snap.num_interactions / (snap.num_users * snap.num_items)


def moments(values: Sequence[float], bias_corrected: bool = False) -> Moments:
    """Mean, standard deviation, skewness and (non-excess) kurtosis.

    By default these are the plain moment estimators with denominator n:
    ``std = sqrt(m2)``, ``skewness = m3 / m2**1.5``, ``kurtosis = m4 / m2**2``.

    With ``bias_corrected=True`` the sample estimators are returned instead:
    std with denominator n - 1, the adjusted Fisher-Pearson skewness
    ``G1 = g1 * sqrt(n (n - 1)) / (n - 2)`` and the adjusted excess kurtosis
    ``G2`` shifted by +3 so both modes report kurtosis on the same scale.
    """
    x = np.asarray(values, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise StatisticsError("need at least two values")
    mean = float(x.mean())
    d = x - mean
    d2 = d * d
    m2 = float(d2.mean())
    if m2 == 0.0:
        raise StatisticsError("zero variance: skewness and kurtosis are undefined")
    m3 = float((d2 * d).mean())
    m4 = float((d2 * d2).mean())
    g1 = m3 / m2 ** 1.5
    kurt = m4 / (m2 * m2)
    if not bias_corrected:
        return Moments(mean, math.sqrt(m2), g1, kurt)
    if n < 4:
        raise StatisticsError("bias-corrected skewness/kurtosis need at least four values")
    std = math.sqrt(m2 * n / (n - 1))
    skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
    excess = ((n + 1) * (kurt - 3.0) + 6.0) * (n - 1) / ((n - 2) * (n - 3))
    return Moments(mean, std, skew, excess + 3.0)


def user_counts(store: StoreLike) -> np.ndarray:
    snap = as_snapshot(store)
    return snap.user_degree[snap.users()]


def dataset_stats(store: StoreLike, bias_corrected: bool = False) -> DatasetStats:
    snap = as_snapshot(store)
    dens = density(snap)
    m = moments(user_counts(snap), bias_corrected=bias_corrected)
    return DatasetStats(
        density=dens,
        mean=m.mean,
        std=m.std,
        skewness=m.skewness,
        kurtosis=m.kurtosis,
        num_users=snap.num_users,
        num_items=snap.num_items,
        num_interactions=snap.num_interactions,
    )
