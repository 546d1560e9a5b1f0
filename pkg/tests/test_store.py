import math
import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from facetrec.store import InteractionStore, Snapshot, ValidationError

from conftest import make_store, random_histories


class TestAddInteraction:
    def test_single_insertion(self):
        s = InteractionStore()
        s.add_interaction(1, 10)
        assert s.items_of(1) == [(10, 1.0)]

    def test_repeat_overwrites(self):
        s = InteractionStore()
        s.add_interaction(1, 10, 3.0)
        s.add_interaction(1, 10, 3.0)
        assert s.num_interactions == 1
        s.add_interaction(1, 10, 4.5)
        assert s.items_of(1) == [(10, 4.5)]
        assert s.users_of(10) == [(1, 4.5)]
        assert s.num_interactions == 1

    def test_inverted_symmetry(self):
        s = InteractionStore()
        s.add_interaction(1, 10)
        s.add_interaction(2, 10)
        assert [u for u, _ in s.users_of(10)] == [1, 2]

    @pytest.mark.parametrize("weight", [-1.0, math.nan, math.inf])
    def test_rejects_bad_weight(self, weight):
        s = InteractionStore()
        with pytest.raises(ValidationError):
            s.add_interaction(1, 1, weight)
        assert s.num_interactions == 0

    def test_rejects_bad_ids(self):
        s = InteractionStore()
        with pytest.raises(ValidationError):
            s.add_interaction(-1, 1)
        with pytest.raises(ValidationError):
            s.add_interaction("u1", 1)

    def test_extend_validates_before_applying(self):
        s = InteractionStore()
        with pytest.raises(ValidationError):
            s.extend([(0, 0, 1.0), (1, 1, -2.0)])
        assert s.num_interactions == 0


class TestQueries:
    def test_unknown_user_and_item(self):
        s = make_store({1: [1]})
        assert s.items_of(99) == []
        assert s.users_of(99) == []
        snap = s.snapshot()
        assert snap.items_of(99) == [] and snap.users_of(99) == []
        assert snap.items_of(-1) == []

    def test_items_sorted(self):
        s = make_store({1: [5, 0, 3]})
        assert [i for i, _ in s.items_of(1)] == [0, 3, 5]
        assert s.snapshot().item_ids(1).tolist() == [0, 3, 5]

    def test_posting_lengths_sum_to_interactions(self):
        s = make_store(random_histories(random.Random(3), 80, 40, 10))
        snap = s.snapshot()
        assert sum(len(snap.users_of(i)) for i in range(snap.item_capacity)) == s.num_interactions


class TestSnapshot:
    def test_isolation(self):
        s = make_store({1: [1, 2]})
        snap = s.snapshot()
        s.add_interaction(9, 9)
        assert snap.items_of(9) == []
        assert snap.num_interactions == 2
        assert s.snapshot().items_of(9) == [(9, 1.0)]

    def test_empty(self):
        snap = InteractionStore().snapshot()
        assert snap.num_interactions == 0
        assert snap.num_users == 0 and snap.num_items == 0

    def test_cached_until_write(self):
        s = make_store({1: [1]})
        assert s.snapshot() is s.snapshot()
        first = s.snapshot()
        s.add_interaction(2, 1)
        assert s.snapshot() is not first

    def test_read_only(self):
        snap = make_store({1: [1]}).snapshot()
        with pytest.raises(ValueError):
            snap.user_items[0] = 5

    def test_matches_source_exhaustively(self):
        rng = random.Random(50)
        hist = {u: rng.sample(range(60), rng.randint(0, 12)) for u in range(50)}
        store = InteractionStore()
        for u, items in hist.items():
            for i in items:
                store.add_interaction(u, i, rng.choice([None, float(rng.randint(0, 5))]))
        snap = store.snapshot()
        for u in range(55):
            assert snap.items_of(u) == store.items_of(u)
        for i in range(65):
            assert snap.users_of(i) == store.users_of(i)
        assert (snap.num_users, snap.num_items, snap.num_interactions) == (
            store.num_users, store.num_items, store.num_interactions)


ops = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 30), st.one_of(st.none(), st.floats(0, 10))),
    max_size=200,
)


@settings(max_examples=100, deadline=None)
@given(ops)
def test_view_duality_and_counters(seq):
    store = InteractionStore()
    for u, i, w in seq:
        store.add_interaction(u, i, w)
    expected = {}
    for u, i, w in seq:
        expected[(u, i)] = 1.0 if w is None else w
    snap = store.snapshot()
    forward = {(u, i): w for u in range(31) for i, w in snap.items_of(u)}
    inverted = {(u, i): w for i in range(31) for u, w in snap.users_of(i)}
    assert forward == inverted == expected
    assert store.num_interactions == len(expected)
    assert store.num_users == len({u for u, _ in expected})
    assert store.num_items == len({i for _, i in expected})
    assert snap.num_users == store.num_users and snap.num_items == store.num_items


def test_concurrent_readers_and_writer():
    store = make_store({0: [0]})
    errors = []

    def writer():
        for n in range(1, 300):
            store.add_interaction(n, n % 17)

    def reader():
        try:
            for _ in range(200):
                snap = store.snapshot()
                total = sum(len(snap.item_ids(u)) for u in range(snap.user_capacity))
                assert total == snap.num_interactions
        except AssertionError as exc:  # pragma: no cover - failure path
            errors.append(exc)

    threads = [threading.Thread(target=writer)] + [threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert store.num_interactions == 300


def test_from_triples_roundtrip():
    s = make_store({0: [1, 2], 3: [2]})
    again = InteractionStore.from_triples(s.triples())
    assert list(again.triples()) == list(s.triples())
    assert isinstance(again.snapshot(), Snapshot)
