from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diambound import metric_graph as mg
from diambound.suites import brute_force_girth


def G(n, *edges):
    return mg.MetricGraph(n, tuple(edges))


THETA = G(2, (0, 1, 1), (0, 1, 2), (0, 1, 3))


def test_rank_examples():
    assert mg.cycle_rank(G(1, (0, 0, 1))) == 1
    assert mg.cycle_rank(THETA) == 2
    assert mg.cycle_rank(G(4, (0, 1, 1), (1, 2, 1), (1, 3, 1))) == 0
    assert mg.cycle_rank(G(4, (0, 0, 1), (2, 3, 1), (3, 2, 1))) == 2


def test_girth_examples():
    eps = Fraction(1, 7)
    assert mg.girth(G(1, (0, 0, eps))) == eps
    assert mg.girth(THETA) == 3
    assert mg.girth(G(3, (0, 1, 1), (1, 2, 1))) == math.inf


def test_certificate_examples():
    eps = Fraction(1, 3)
    for k in (1, 2, 5):
        rose = G(1, *[(0, 0, eps)] * k)
        cert = mg.rank_bound_certificate(rose, k * eps + Fraction(1, 100), eps)
        assert cert.rank == k and cert.bound == 32 * (k * eps + Fraction(1, 100)) ** 2 / eps**2 and cert.holds
    cert = mg.rank_bound_certificate(G(1, (0, 0, eps)), 2 * eps, eps)
    assert (cert.rank, cert.bound) == (1, 128)


def test_certificate_hypotheses():
    with pytest.raises(mg.HypothesisViolation, match="total length"):
        mg.rank_bound_certificate(THETA, 6, 1)
    with pytest.raises(mg.HypothesisViolation, match="girth"):
        mg.rank_bound_certificate(THETA, 7, 4)


def test_coarse_examples():
    rng = random.Random(0)
    big = mg.subdivide(G(2, (0, 1, 1), (0, 1, 1), (0, 1, 1)), rng, 100)
    H = mg.coarse_subdivision(big)
    assert H.edge_count == 3 and mg.total_length(H) == 3
    K4 = G(4, *[(i, j, 1) for i in range(4) for j in range(i + 1, 4)])
    assert mg.coarse_subdivision(K4).edge_count == 6 == 3 * (mg.cycle_rank(K4) - 1)
    eight = G(3, (0, 1, 1), (1, 0, 1), (0, 2, 1), (2, 0, 1))
    assert mg.coarse_subdivision(eight).edge_count == 2


def test_coarse_errors():
    with pytest.raises(mg.HypothesisViolation, match="univalent"):
        mg.coarse_subdivision(G(3, (0, 0, 1), (0, 0, 1), (0, 1, 1)))
    with pytest.raises(mg.HypothesisViolation, match="rank"):
        mg.coarse_subdivision(G(1, (0, 0, 1)))
    with pytest.raises(mg.HypothesisViolation, match="connected"):
        mg.coarse_subdivision(G(2, (0, 0, 1), (0, 0, 1), (1, 1, 1), (1, 1, 1)))


def test_good_subgraph_examples():
    whisker = G(2, (0, 0, 2), (0, 1, 5))
    H = mg.good_subgraph(whisker)
    assert (H.vertex_count, H.edges) == (1, ((0, 0, 2),))
    tree = G(4, (0, 1, 1), (1, 2, 1), (1, 3, 1))
    assert mg.good_subgraph(tree) == G(0)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_pruning_and_girth_random(seed):
    rng = random.Random(seed)
    g = mg.random_graph(rng, max_vertices=6, max_edges=9)
    H = mg.good_subgraph(g)
    assert mg.cycle_rank(H) == mg.cycle_rank(g)
    assert mg.total_length(H) <= mg.total_length(g)
    assert all(d >= 2 for d in H.degrees())
    assert mg.girth(g) == brute_force_girth(g)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_coarse_random(seed):
    g = mg.random_closed_connected_graph(random.Random(seed))
    H = mg.coarse_subdivision(g)
    R = mg.cycle_rank(g)
    assert H.edge_count <= 3 * (R - 1)
    assert 3 * H.vertex_count <= 2 * H.edge_count
    assert mg.cycle_rank(H) == R and mg.total_length(H) == mg.total_length(g)


def test_bridges():
    whisker = G(3, (0, 0, 2), (0, 1, 5), (1, 2, 1))
    assert mg.bridges(whisker) == {1, 2}


def test_format_roundtrip():
    text = "V 3\nE 0 1 1/2\nE 1 2 2.5\nE 2 2 3\n"
    g = mg.parse_graph(text)
    assert g.edges[0][2] == Fraction(1, 2) and isinstance(g.edges[1][2], float)
    assert mg.parse_graph(mg.format_graph(g)) == g


@pytest.mark.parametrize(
    "text, line",
    [("E 0 1 1\n", 1), ("V 2\nE 0 2 1\n", 2), ("V 2\n\nE 0 1 -1\n", 3), ("V 2\nX\n", 2), ("V 2\nE 0 1 abc\n", 2)],
)
def test_format_errors(text, line):
    with pytest.raises(mg.GraphFormatError) as info:
        mg.parse_graph(text)
    assert info.value.line == line
