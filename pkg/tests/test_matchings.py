import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from immersion.errors import HallViolated, PreconditionViolated
from immersion.matchings import (
    Cover,
    Hypomatchable,
    MultipartiteWitness,
    PerfectMatching,
    SmallCover,
    check_cover,
    check_small_cover,
    complement_adj,
    edmonds_gallai,
    hall_injection,
    is_complete_multipartite_subgraph,
    is_hypomatchable,
    is_matching,
    match_structure,
    maximum_matching,
    perfect_matching,
    small_cover_or_witness,
)
from immersion.multigraph import MultiGraph
from oracles import has_perfect_matching, hypomatchable, injections, max_matching_size


def adj_of(n, edges):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def cover_is_valid_by_brute_force(adj, cover):
    T = set(cover.T)
    if len(cover.M) != len(T):
        return False
    for comp in cover.components:
        if not hypomatchable({v: adj[v] & comp for v in comp}):
            return False
    return not check_cover(adj, cover)


K3 = adj_of(3, [(0, 1), (1, 2), (0, 2)])
K2 = adj_of(2, [(0, 1)])
STAR = adj_of(4, [(0, 1), (0, 2), (0, 3)])
C5 = adj_of(5, [(i, (i + 1) % 5) for i in range(5)])


def test_maximum_matching_examples():
    assert len(maximum_matching(K2)) == 1
    assert len(maximum_matching(C5)) == 2
    petersen = nx.petersen_graph()
    adj = {v: set(petersen[v]) for v in petersen}
    assert len(maximum_matching(adj)) == max_matching_size(adj) == 5


def test_hypomatchable_examples():
    assert is_hypomatchable(K3)
    assert is_hypomatchable({0: set()})
    p4 = adj_of(4, [(0, 1), (1, 2), (2, 3)])
    res = is_hypomatchable(p4)
    assert not res and not hypomatchable(p4)


def test_edmonds_gallai_examples():
    c = edmonds_gallai(K3)
    assert c.T == frozenset() and c.components == (frozenset({0, 1, 2}),) and c.M == ()
    c = edmonds_gallai(K2)
    assert c.T == frozenset({0}) and c.components == (frozenset({1}),) and c.M == ((0, 1),)
    c = edmonds_gallai(STAR)
    assert c.T == frozenset({0}) and len(c.components) == 3 and len(c.M) == 1
    for adj in (K3, K2, STAR):
        assert cover_is_valid_by_brute_force(adj, edmonds_gallai(adj))


def test_match_structure_examples():
    assert isinstance(match_structure(adj_of(4, [(0, 1), (2, 3)])), PerfectMatching)
    assert isinstance(match_structure(C5), Hypomatchable)
    star_plus = adj_of(5, [(0, 1), (0, 2), (0, 3)])
    st_ = match_structure(star_plus)
    assert isinstance(st_, Cover)
    assert len(st_.cover.T) == 1 and len(st_.cover.components) == 4
    assert all(len(c) == 1 for c in st_.cover.components)


def test_small_cover_examples():
    h = complement_adj(adj_of(5, [(0, 1), (0, 2), (0, 3)]))
    out = small_cover_or_witness(h, 4)
    assert isinstance(out, SmallCover) and len(out.T) == 1 and len(out.W) == 3
    out = small_cover_or_witness(h, 3)
    assert isinstance(out, MultipartiteWitness) and len(out.parts) == 4
    assert all(len(p) == 1 for p in out.parts)
    k5 = adj_of(5, itertools.combinations(range(5), 2))
    out = small_cover_or_witness(k5, 5)
    assert isinstance(out, SmallCover) and len(out.W) == 4 and out.T == frozenset()
    assert not check_small_cover(k5, out, 5)


def test_small_cover_precondition():
    with pytest.raises(PreconditionViolated):
        small_cover_or_witness(adj_of(4, []), 2)  # complement K4 has a perfect matching
    with pytest.raises(PreconditionViolated):
        small_cover_or_witness(adj_of(3, []), 2)  # complement K3 is hypomatchable


def test_hall_injection_examples():
    assert hall_injection([], {}) == {}
    knn = {("s", i): [("t", j) for j in range(3)] for i in range(3)}
    g = hall_injection(list(knn), knn)
    assert len(set(g.values())) == 3
    nbrs = {0: {"a"}, 1: {"a", "b"}, 2: {"b", "c"}}
    sdrs = list(injections([0, 1, 2], nbrs))
    assert len(sdrs) == 1
    assert hall_injection([0, 1, 2], nbrs) == sdrs[0]


def test_hall_violation_names_a_set():
    nbrs = {0: {"a"}, 1: {"a"}, 2: {"b"}}
    with pytest.raises(HallViolated) as info:
        hall_injection([0, 1, 2], nbrs)
    bad = set(info.value.violating_set)
    assert len(bad) > len(set().union(*(nbrs[s] for s in bad)))


def test_multigraph_input_must_be_simple():
    from immersion.errors import NotSimple

    with pytest.raises(NotSimple):
        maximum_matching(MultiGraph.from_edges(2, [(0, 1), (0, 1)]))


# -- properties -----------------------------------------------------------


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return adj_of(n, [p for p, c in zip(pairs, chosen) if c])


@settings(max_examples=400, deadline=None)
@given(small_graphs())
def test_matching_size_matches_brute_force(adj):
    m = maximum_matching(adj)
    assert is_matching(m, adj)
    assert len(m) == max_matching_size(adj)
    pm = perfect_matching(adj)
    assert (pm is not None) == has_perfect_matching(adj)


@settings(max_examples=300, deadline=None)
@given(small_graphs(7))
def test_trichotomy_exclusive_with_witnesses(adj):
    s = match_structure(adj)
    pm = has_perfect_matching(adj)
    hyp = hypomatchable(adj) if adj else False
    if isinstance(s, PerfectMatching):
        assert pm and is_matching(s.M, adj) and 2 * len(s.M) == len(adj)
    elif isinstance(s, Hypomatchable):
        assert not pm and hyp
        for v in adj:
            w = s.without(v)
            assert is_matching(w, adj) and v not in {x for e in w for x in e}
            assert 2 * len(w) == len(adj) - 1
    else:
        assert not pm and not hyp
        assert cover_is_valid_by_brute_force(adj, s.cover)


@settings(max_examples=300, deadline=None)
@given(small_graphs(10))
def test_edmonds_gallai_always_valid(adj):
    assert not check_cover(adj, edmonds_gallai(adj, validate=True))


@settings(max_examples=300, deadline=None)
@given(small_graphs(9), st.integers(1, 9))
def test_small_cover_conclusions(h, tau):
    if not h or not isinstance(match_structure(complement_adj(h)), Cover):
        return
    out = small_cover_or_witness(h, tau)
    if isinstance(out, SmallCover):
        assert not check_small_cover(h, out, tau)
        W, T = set(out.W), set(out.T)
        assert W and not (W & T) and len(T) <= len(W) <= tau - 1
        for w in W:
            assert set(h) - T - W - {w} <= h[w]
            assert len(h[w]) >= len(h) - tau
    else:
        assert is_complete_multipartite_subgraph(h, out.parts)
        total = sum(len(p) for p in out.parts)
        assert total - max(len(p) for p in out.parts) >= tau


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_hall_injection_random(seed):
    rng = random.Random(seed)
    S = list(range(rng.randint(0, 5)))
    nbrs = {s: {rng.randrange(6) for _ in range(rng.randint(0, 3))} for s in S}
    exists = next(injections(S, nbrs), None) is not None if S else True
    if exists:
        g = hall_injection(S, nbrs)
        assert all(g[s] in nbrs[s] for s in S) and len(set(g.values())) == len(S)
    else:
        with pytest.raises(HallViolated):
            hall_injection(S, nbrs)
