import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from immersion.certify import lift_certificate, verify_strong_immersion
from immersion.eulprep import (
    ImmersionFound,
    Prepared,
    bounded_degree_spanning_tree,
    check_spanning_tree,
    eulerianize,
    find_small_cut,
    near_regularize,
    parity_forest,
    well_connected_core,
)
from immersion.errors import OddTotal, PreconditionViolated, TargetUnreached
from immersion.generators import complete, random_regular
from immersion.multigraph import DerivationLog, MultiGraph, boundary_size
from oracles import min_spanning_tree_degree, to_nx


def two_cliques(k):
    edges = list(itertools.combinations(range(k), 2))
    edges += [(u + k, v + k) for u, v in itertools.combinations(range(k), 2)]
    return MultiGraph.from_edges(2 * k, edges + [(0, k)])


def cycle(n):
    return MultiGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_core_examples():
    assert well_connected_core(complete(11), 10) == set(range(11))
    X = well_connected_core(two_cliques(12), 10)
    assert X in (set(range(12)), set(range(12, 24)))
    assert well_connected_core(cycle(9), 2) == set(range(9))
    with pytest.raises(PreconditionViolated):
        well_connected_core(cycle(5), 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_small_cut_agrees_with_networkx(seed, k):
    rng = random.Random(seed)
    n = rng.randint(2, 9)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
    edges += [e for e in edges if rng.random() < 0.3]
    g = MultiGraph.from_edges(n, edges)
    side = find_small_cut(g, g.vertices(), k)
    h = nx.Graph()
    h.add_nodes_from(range(n))
    for u, v in edges:
        w = h[u][v]["weight"] + 1 if h.has_edge(u, v) else 1
        h.add_edge(u, v, weight=w)
    lam = 0 if not nx.is_connected(h) else nx.stoer_wagner(h)[0]
    if lam >= k:
        assert side is None
    else:
        assert side and len(side) < n and boundary_size(g, side) < k


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_core_postconditions(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 4, 6])
    g = MultiGraph.from_edges(14, [e for e in itertools.combinations(range(14), 2) if rng.random() < 0.6])
    for v in g.vertices():
        while g.degree(v) < d:
            w = rng.choice([x for x in range(14) if x != v and not g.has_edge(v, x)])
            g.add_edge(v, w)
    X = well_connected_core(g, d)
    assert X and boundary_size(g, X) < d
    assert find_small_cut(g, X, d // 2) is None


def test_near_regular_leaves_regular_input_alone():
    g = random_regular(30, 8, seed=3)
    out = near_regularize(g, DerivationLog.for_root(g), 8, 2)
    assert isinstance(out, Prepared) and out.graph == g and len(out.log) == 0


def test_near_regular_complete_graph():
    d, t = 6, 2
    g = complete(d + t + 2)
    out = near_regularize(g, DerivationLog.for_root(g), d, t)
    if isinstance(out, Prepared):
        degs = out.graph.degrees().values()
        assert min(degs) >= d - 1 and max(degs) <= d + t
        assert out.log.replay(g) == out.graph
    else:
        assert verify_strong_immersion(g, lift_certificate(g, out.log, out.certificate))


def test_near_regular_eliminates_one_high_vertex():
    # v = 0 sees a 6-cycle; its complement (a prism) has a perfect matching
    d, t = 4, 1
    N = list(range(1, 7))
    W = list(range(7, 13))
    edges = [(0, n) for n in N]
    edges += [(N[i], N[(i + 1) % 6]) for i in range(6)]
    edges += [(n, w) for n, w in zip(N, W)]
    edges += [(a, b) for a, b in itertools.combinations(W, 2) if b - a != 3]
    g = MultiGraph.from_edges(13, edges)
    assert g.degree(0) == d + t + 1
    out = near_regularize(g, DerivationLog.for_root(g), d, t)
    assert isinstance(out, Prepared)
    h = out.graph
    assert 0 not in h
    assert all(d - 1 <= h.degree(v) <= d + t for v in h.vertices())
    assert all(h.degree(n) >= g.degree(n) - 1 for n in N)
    assert out.log.replay(g) == h


def test_spanning_tree_examples():
    c = cycle(8)
    tree = bounded_degree_spanning_tree(c, 2)
    assert not check_spanning_tree(c, tree, 2)
    k = complete(12)
    assert not check_spanning_tree(k, bounded_degree_spanning_tree(k, 5), 5)
    star = MultiGraph.from_edges(7, [(0, i) for i in range(1, 7)])
    with pytest.raises(TargetUnreached) as info:
        bounded_degree_spanning_tree(star, 5)
    assert info.value.best_degree == 6


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_spanning_tree_matches_brute_force(seed, k):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    g = MultiGraph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5])
    if not g.is_connected():
        return
    best = min_spanning_tree_degree(g)
    if best <= k:
        assert not check_spanning_tree(g, bounded_degree_spanning_tree(g, k, seed=seed), k)
    else:
        with pytest.raises(TargetUnreached):
            bounded_degree_spanning_tree(g, k, seed=seed)


def test_parity_forest_examples():
    tree = [(0, 1), (1, 2), (2, 3)]
    assert parity_forest(tree, {v: 0 for v in range(4)}) == []
    assert parity_forest([(0, 1), (1, 2)], {0: 1, 1: 0, 2: 1}) == [(0, 1), (1, 2)]
    star = [(0, i) for i in range(1, 5)]
    assert parity_forest(star, {0: 0, 1: 1, 2: 1, 3: 0, 4: 0}) == [(0, 1), (0, 2)]
    with pytest.raises(OddTotal):
        parity_forest(tree, {0: 1, 1: 0, 2: 0, 3: 0})


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parity_forest_hits_every_parity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    tree = [(rng.randrange(v), v) for v in range(1, n)]
    f = {v: rng.randint(0, 1) for v in range(n)}
    if sum(f.values()) % 2:
        f[0] ^= 1
    chosen = parity_forest(tree, f)
    assert set(chosen) <= {(min(e), max(e)) for e in tree}
    deg = {v: 0 for v in range(n)}
    for u, v in chosen:
        deg[u] += 1
        deg[v] += 1
    assert all(deg[v] % 2 == f[v] for v in range(n))


def check_prepared(g, out, d):
    if isinstance(out, ImmersionFound):
        assert verify_strong_immersion(g, lift_certificate(g, out.log, out.certificate))
        return None
    h = out.graph
    assert h.is_eulerian() and h.deficiency_sum(d) < d
    assert out.log.replay(g) == h
    return h


@pytest.mark.nodebug
def test_eulerianize_complete():
    t = 1
    d = 2 * t + 12
    g = complete(4 * t + 20)
    check_prepared(g, eulerianize(g, DerivationLog.for_root(g), d, t), d)


@pytest.mark.nodebug
def test_eulerianize_regular():
    d, t = 14, 1
    g = random_regular(60, d + 6, seed=5)
    h = check_prepared(g, eulerianize(g, DerivationLog.for_root(g), d, t), d)
    assert h is None or h.num_vertices == 60


@pytest.mark.nodebug
def test_eulerianize_planted_cut_localises_deficiency():
    d, t, block = 14, 1, 30
    g1 = random_regular(block, d + 6, seed=1)
    g2 = random_regular(block, d + 6, seed=2)
    (a1, a2), (b1, b2) = g1.canonical_edge_list()[0], g2.canonical_edge_list()[0]
    edges = [e for e in g1.canonical_edge_list()[1:]]
    edges += [(u + block, v + block) for u, v in g2.canonical_edge_list()[1:]]
    edges += [(a1, b1 + block), (a2, b2 + block)]
    g = MultiGraph.from_edges(2 * block, edges)
    h = check_prepared(g, eulerianize(g, DerivationLog.for_root(g), d, t), d)
    assert h is not None
    X = set(h.vertices())
    assert X in (set(range(block)), set(range(block, 2 * block)))
    boundary = {a1, a2, b1 + block, b2 + block}
    assert all(v in boundary for v in X if h.degree(v) < d)


def test_eulerianize_preconditions():
    g = complete(20)
    with pytest.raises(PreconditionViolated):
        eulerianize(g, DerivationLog.for_root(g), 13, 1)
    with pytest.raises(PreconditionViolated):
        eulerianize(g, DerivationLog.for_root(g), 14, 1)
