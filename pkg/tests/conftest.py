import math
import random

import pytest

from facetrec.store import InteractionStore


def make_store(histories: dict) -> InteractionStore:
    store = InteractionStore()
    for user, items in histories.items():
        for item in items:
            store.add_interaction(user, item)
    return store


def random_histories(rng: random.Random, max_users=500, max_items=300, max_per_user=20) -> dict:
    n_users = rng.randint(1, max_users)
    n_items = rng.randint(1, max_items)
    per_user = min(max_per_user, n_items)
    return {u: rng.sample(range(n_items), rng.randint(0, per_user)) for u in range(n_users)}


# --- independent oracles: plain Python sets, no store internals --------------

def naive_similarity(a: set, b: set, metric: str) -> float:
    ov = len(a & b)
    if not a or not b:
        return 0.0
    if metric == "cosine_binary":
        return ov / math.sqrt(len(a) * len(b))
    if metric == "jaccard":
        return ov / len(a | b)
    return float(ov)


def naive_recommend(histories: dict, target, k_items: int, n=None, k=None, metric="cosine_binary"):
    """Whole-pipeline reimplementation of prefiltered / full user-based CF."""
    hist = {u: set(items) for u, items in histories.items()}
    mine = hist.get(target, set())
    overlaps = {v: len(mine & h) for v, h in hist.items() if v != target and mine & h}
    cands = sorted(overlaps.items(), key=lambda e: (-e[1], e[0]))
    if n is not None:
        cands = cands[:n]
    sims = [(v, naive_similarity(mine, hist[v], metric)) for v, _ in cands]
    sims = sorted([s for s in sims if s[1] > 0], key=lambda e: (-e[1], e[0]))
    if k is not None:
        sims = sims[:k]
    scores: dict = {}
    for v, s in sims:
        for item in sorted(hist[v]):
            if item not in mine:
                scores[item] = scores.get(item, 0.0) + s
    return sorted(scores.items(), key=lambda e: (-e[1], e[0]))[:k_items]


def naive_moments(values):
    """Two-pass central moments with exact summation."""
    n = len(values)
    mean = math.fsum(values) / n
    m2 = math.fsum((x - mean) ** 2 for x in values) / n
    m3 = math.fsum((x - mean) ** 3 for x in values) / n
    m4 = math.fsum((x - mean) ** 4 for x in values) / n
    return mean, math.sqrt(m2), m3 / m2 ** 1.5, m4 / m2 ** 2


def naive_ndcg(recommended, relevant, k):
    dcg = 0.0
    for pos in range(1, k + 1):
        if pos <= len(recommended) and recommended[pos - 1] in relevant:
            dcg += 1.0 / math.log(pos + 1, 2)
    idcg = 0.0
    for pos in range(1, min(k, len(relevant)) + 1):
        idcg += 1.0 / math.log(pos + 1, 2)
    return dcg / idcg


@pytest.fixture
def small_store():
    # u1:{a,b,c} u2:{a,b} u3:{c} u4:{d}  with a=0 b=1 c=2 d=3
    return make_store({1: [0, 1, 2], 2: [0, 1], 3: [2], 4: [3]})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
