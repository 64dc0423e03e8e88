"""Randomized properties checked with hypothesis."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_graph
from pinchclust import (
    Ordering,
    WeightedGraph,
    boundary_profile,
    boundary_size,
    compare_widths,
    extract_clusters,
    local_minima,
    roc_auc,
    width_of,
)
from pinchclust.datasets import format_edge_list, read_edge_list

WEIGHTS = st.sampled_from([0.5, 1.0, 2.0, 3.0, 0.25])


@st.composite
def graphs(draw, min_n=2, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return make_graph(n, [(u, v, draw(WEIGHTS)) for u, v in chosen])


@st.composite
def graph_and_order(draw, min_n=2, max_n=10):
    g = draw(graphs(min_n, max_n))
    return g, tuple(draw(st.permutations(range(g.n))))


settings.register_profile("ci", max_examples=150, deadline=None)
settings.load_profile("ci")


@given(graphs(1, 12), st.data())
def test_boundary_of_complement(g, data):
    a = data.draw(st.sets(st.integers(0, g.n - 1)))
    rest = set(range(g.n)) - a
    assert boundary_size(g, a) == boundary_size(g, rest)
    assert boundary_size(g, a) == float(oracles.boundary(g.edges(), a))


@given(graph_and_order())
def test_profile_agrees_with_oracle_and_reverses(go):
    g, seq = go
    o = Ordering(g, seq)
    p = boundary_profile(o)
    assert p == tuple(float(x) for x in oracles.profile(g.edges(), seq))
    assert boundary_profile(o.reversed()) == p[::-1]


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8), st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_width_comparison_is_a_total_order(a, b):
    b = (b * len(a))[: len(a)]
    wa, wb = width_of(a), width_of(b)
    c = compare_widths(wa, wb)
    assert int(c) == -int(compare_widths(wb, wa))
    assert int(c) == (wa > wb) - (wa < wb)


@given(st.lists(st.integers(0, 4), max_size=15))
def test_local_minima_match_oracle(p):
    assert local_minima(p) == oracles.local_minima(p)


@given(graph_and_order(3, 10))
def test_clusters_partition_the_ordering(go):
    g, seq = go
    part = extract_clusters(Ordering(g, seq))
    assert tuple(v for block in part.blocks for v in block) == seq
    p = boundary_profile(Ordering(g, seq))
    assert list(part.cuts) == oracles.local_minima(p)


@st.composite
def scored_truth(draw):
    n = draw(st.integers(2, 30))
    truth = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n).filter(lambda t: 0 < sum(t) < len(t)))
    scores = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]), min_size=n, max_size=n))
    return {f"x{i}": s for i, s in enumerate(scores)}, {f"x{i}": y for i, y in enumerate(truth)}


@given(scored_truth())
def test_roc_exact_and_rank_invariant(st_pair):
    scores, truth = st_pair
    pos = [scores[v] for v, y in truth.items() if y]
    neg = [scores[v] for v, y in truth.items() if not y]
    auc = roc_auc(scores, truth)
    exact = oracles.auc_pairs(pos, neg)
    assert auc == float(exact)
    # strictly increasing transforms keep the area
    assert roc_auc({v: np.exp(3 * s) - 7 for v, s in scores.items()}, truth) == auc
    # reversing the score order mirrors it
    assert roc_auc({v: -s for v, s in scores.items()}, truth) == float(1 - exact)


@given(g=graphs(1, 12), names=st.lists(st.text("abcxyz_0123", min_size=1, max_size=4), min_size=12, max_size=12, unique=True))
def test_edge_list_round_trip(g, names, tmp_path_factory):
    h = WeightedGraph(names[: g.n], g.edges())
    path = tmp_path_factory.mktemp("rt") / "g.tsv"
    path.write_text(format_edge_list(h), encoding="utf-8")
    back = read_edge_list(path)
    assert back == h
    assert format_edge_list(back) == format_edge_list(h)
