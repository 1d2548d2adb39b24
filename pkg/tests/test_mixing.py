import math
import os

import numpy as np
import pytest

from lingequiv.digraph import Digraph
from lingequiv.errors import GraphFormatError
from lingequiv.mixing import (
    MixingMatrix,
    WeightedModel,
    fullrank_confidence,
    mixing,
    numeric_rank,
    read_mixing_csv,
    sample_data,
    sample_weights,
    scramble,
    write_mixing_csv,
)
from lingequiv.ranks import path_rank

from conftest import five_vertex, layered_graph, random_irreducible


def test_sample_weights_edgeless():
    g = Digraph.build([], ["X1", "X2"], [])
    model = sample_weights(g, seed=1)
    assert not model.weights.any()
    a = mixing(model)
    assert np.allclose(a.values, np.eye(2))


def test_sample_weights_deterministic_and_ranged(rng):
    g = five_vertex("G1")
    w1 = sample_weights(g, seed=42).weights
    w2 = sample_weights(g, seed=42).weights
    assert (w1 == w2).all()
    for _ in range(200):
        h = random_irreducible(rng.randint(2, 6), 0, rng, connected=False)
        w = sample_weights(h, seed=rng.randrange(10**6)).weights
        mags = np.abs(w[w != 0])
        assert ((mags >= 0.5) & (mags <= 2.5)).all()


def test_weights_respect_graph_support():
    g = Digraph.build([], ["X1", "X2"], [("X1", "X2")])
    b = np.zeros((2, 2))
    b[0, 1] = 1.5  # X2 -> X1 edge does not exist
    with pytest.raises(GraphFormatError):
        WeightedModel(g, b)


def test_mixing_single_edge():
    g = Digraph.build(["L1"], ["X1"], [("L1", "X1")])
    b = np.zeros((2, 2))
    b[1, 0] = 0.7
    a = mixing(WeightedModel(g, b))
    assert a.values.shape == (1, 2)
    assert math.isclose(a.values[0, 0], 0.7)
    assert math.isclose(a.values[0, 1], 1.0)


def test_mixing_generic_rank_matches_path_rank():
    g = layered_graph(3, 4)
    model = sample_weights(g, seed=5)
    a = mixing(model)
    z = [a.row_labels.index(f"Z{i+1}") for i in range(4)]
    y = [a.col_labels.index(f"Y{i+1}") for i in range(3)]
    block = a.values[np.ix_(z, y)]
    zi = {g.index_of(f"Z{i+1}") for i in range(4)}
    yi = {g.index_of(f"Y{i+1}") for i in range(3)}
    assert numeric_rank(block) == path_rank(g, zi, yi) == 2


def test_scramble_identity_like_and_rank_invariance(rng):
    g = five_vertex("G1")
    a = mixing(sample_weights(g, seed=3))
    s = scramble(a, seed=9)
    assert s.col_labels is None
    for _ in range(50):
        rows = [i for i in range(a.values.shape[0]) if rng.random() < 0.6]
        assert numeric_rank(a.values[rows, :]) == numeric_rank(s.values[rows, :])


def test_numeric_rank_trivial():
    assert numeric_rank(np.eye(3)) == 3
    outer = np.outer([1.0, 2.0, 3.0], [4.0, 5.0])
    assert numeric_rank(outer) == 1
    assert numeric_rank(np.zeros((2, 2))) == 0
    assert numeric_rank(np.zeros((0, 3))) == 0
    # a numerically-zero block judged against an outer scale
    tiny = np.full((1, 1), 1e-15)
    assert numeric_rank(tiny) == 1
    assert numeric_rank(tiny, scale=1.0) == 0


def test_fullrank_confidence_values():
    # sigma_min = 0.02 sits exactly at the sigmoid midpoint
    assert math.isclose(fullrank_confidence(np.diag([1.0, 0.02])), 0.5)
    assert fullrank_confidence(np.diag([1.0, 1.0])) > 1 - 1e-9
    val = fullrank_confidence(np.diag([1.0, 0.0]))
    assert math.isclose(val, 1.0 / (1.0 + math.exp(0.5)), rel_tol=1e-12)
    assert fullrank_confidence(np.zeros((0, 2))) == 1.0


def test_sample_data_shapes_and_moments():
    g = Digraph.build([], ["X1", "X2"], [])
    model = sample_weights(g, seed=0)
    assert sample_data(model, 0, seed=1).shape == (0, 2)
    data = sample_data(model, 50_000, seed=1)
    corr = np.corrcoef(data.T)[0, 1]
    assert abs(corr) < 0.02

    g2 = five_vertex("G1")
    model2 = sample_weights(g2, seed=2)
    a = mixing(model2)
    data2 = sample_data(model2, 100_000, seed=3)
    want = a.values @ a.values.T / 12.0
    got = np.cov(data2.T, bias=True)
    assert np.allclose(got, want, rtol=0.06, atol=0.01)


def test_mixing_csv_round_trip(tmp_path):
    g = five_vertex("G1")
    a = mixing(sample_weights(g, seed=11))
    path = tmp_path / "mix.csv"
    write_mixing_csv(a, path)
    back = read_mixing_csv(path)
    assert back.row_labels == a.row_labels
    assert back.col_labels == a.col_labels
    assert np.allclose(back.values, a.values, rtol=0, atol=0)

    s = scramble(a, seed=1)
    write_mixing_csv(s, path)
    back = read_mixing_csv(path)
    assert back.col_labels is None
    assert np.allclose(back.values, s.values)


def test_duality_bridge_on_unscrambled_mixing(rng):
    # numeric rank of a mixing block equals the edge rank of the
    # complementary support block shifted by the dimension bookkeeping
    from lingequiv.ranks import edge_rank

    for trial in range(20):
        n = rng.randint(3, 6)
        g = random_irreducible(n, rng.randint(0, min(2, n - 2)), rng)
        a = mixing(sample_weights(g, seed=900 + trial))
        scale = float(np.linalg.svd(a.values, compute_uv=False)[0])
        obs = sorted(g.observed)
        allv = set(range(n))
        for _ in range(25):
            z = [v for v in obs if rng.random() < 0.5]
            y = [v for v in range(n) if rng.random() < 0.5]
            block = a.values[np.ix_([obs.index(v) for v in z], y)]
            want = len(z) + len(y) - n + edge_rank(g, allv - set(y), allv - set(z))
            assert numeric_rank(block, scale=scale) == want


def test_lemma32_spot_checks(rng):
    # numeric rank of mixing blocks equals the path rank, generically
    for trial in range(40):
        n = rng.randint(3, 7)
        g = random_irreducible(n, rng.randint(0, min(2, n - 2)), rng)
        a = mixing(sample_weights(g, seed=trial))
        scale = float(np.linalg.svd(a.values, compute_uv=False)[0])
        obs = sorted(g.observed)
        for _ in range(20):
            z = [v for v in obs if rng.random() < 0.5]
            y = [v for v in range(g.n) if rng.random() < 0.5]
            block = a.values[np.ix_([obs.index(v) for v in z], y)]
            assert numeric_rank(block, scale=scale) == path_rank(g, set(z), set(y))
