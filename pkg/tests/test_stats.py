import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facetrec.stats import StatisticsError, dataset_stats, density, moments
from facetrec.store import InteractionStore

from conftest import make_store, naive_moments


class TestDensity:
    def test_ratio(self):
        # 2 users x 3 items, 3 interactions
        store = make_store({0: [0, 1], 1: [2]})
        assert density(store) == 0.5

    def test_complete(self):
        assert density(make_store({u: range(4) for u in range(3)})) == 1.0
        assert density(make_store({0: [0]})) == 1.0

    def test_empty(self):
        with pytest.raises(StatisticsError):
            density(InteractionStore())


class TestMoments:
    def test_symmetric(self):
        assert moments([1, 2, 3]).skewness == pytest.approx(0.0, abs=1e-12)

    def test_right_skewed(self):
        m = moments([1, 1, 1, 10])
        assert m.skewness == pytest.approx(1.1547005383792515, abs=1e-9)
        assert m.kurtosis == pytest.approx(2.3333333333333335, abs=1e-9)

    def test_constant(self):
        with pytest.raises(StatisticsError):
            moments([4, 4, 4])

    def test_too_short(self):
        with pytest.raises(StatisticsError):
            moments([1.0])

    def test_bias_corrected(self):
        x = [1.0, 2.0, 2.0, 3.0, 9.0, 4.0]
        n = len(x)
        plain = moments(x)
        corr = moments(x, bias_corrected=True)
        assert corr.std == pytest.approx(np.std(x, ddof=1), rel=1e-12)
        assert corr.skewness == pytest.approx(plain.skewness * np.sqrt(n * (n - 1)) / (n - 2), rel=1e-12)
        g2 = plain.kurtosis - 3
        assert corr.kurtosis - 3 == pytest.approx(((n + 1) * g2 + 6) * (n - 1) / ((n - 2) * (n - 3)), rel=1e-12)


values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=60).filter(
    lambda v: np.std(v) > 1e-3 * (1 + max(abs(x) for x in v))
)


@settings(max_examples=200, deadline=None)
@given(values, st.floats(0.01, 100), st.floats(-1e3, 1e3))
def test_scale_and_shift(v, c, shift):
    base = moments(v)
    scaled = moments([c * x for x in v])
    shifted = moments([x + shift for x in v])
    assert scaled.mean == pytest.approx(c * base.mean, rel=1e-9, abs=1e-9)
    assert scaled.std == pytest.approx(c * base.std, rel=1e-9)
    assert scaled.skewness == pytest.approx(base.skewness, rel=1e-6, abs=1e-6)
    assert scaled.kurtosis == pytest.approx(base.kurtosis, rel=1e-6)
    assert shifted.std == pytest.approx(base.std, rel=1e-6)
    assert shifted.skewness == pytest.approx(base.skewness, rel=1e-5, abs=1e-5)
    assert shifted.kurtosis == pytest.approx(base.kurtosis, rel=1e-5)


def test_large_vector_matches_two_pass_oracle():
    x = np.random.default_rng(0).lognormal(1.0, 1.0, size=1_000_000)
    got = moments(x)
    want = naive_moments(x.tolist())
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-9 * abs(w)


class TestDatasetStats:
    def test_two_users(self):
        s = dataset_stats(make_store({0: [0], 1: [0, 1, 2]}))
        assert (s.mean, s.std) == (2.0, 1.0)
        assert s.density == pytest.approx(4 / 6)
        assert (s.num_users, s.num_items, s.num_interactions) == (2, 3, 4)

    def test_uniform_counts_error(self):
        with pytest.raises(StatisticsError):
            dataset_stats(make_store({u: [0, 1, 2] for u in range(4)}))

    def test_heavy_tail_vs_uniform(self):
        rng = np.random.default_rng(1)
        heavy = {u: range(int(c)) for u, c in enumerate(np.minimum(rng.zipf(1.8, 500), 200))}
        uniform = {u: range(int(c)) for u, c in enumerate(rng.integers(1, 20, 500))}
        h, u = dataset_stats(make_store(heavy)), dataset_stats(make_store(uniform))
        counts_h = [len(v) for v in heavy.values()]
        counts_u = [len(v) for v in uniform.values()]
        assert h.skewness == pytest.approx(naive_moments(counts_h)[2], rel=1e-9)
        assert h.skewness > 0
        assert h.kurtosis > u.kurtosis == pytest.approx(naive_moments(counts_u)[3], rel=1e-9)

    def test_dict_round_trip(self):
        s = dataset_stats(make_store({0: [0], 1: [0, 1, 2]}))
        assert s.to_dict()["std"] == 1.0
