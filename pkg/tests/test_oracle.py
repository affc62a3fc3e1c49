import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from immersion.certify import verify_strong_immersion
from immersion.errors import BadParams, NotSimple
from immersion.generators import complete, seymour12
from immersion.multigraph import MultiGraph
from immersion.oracle import (
    Exhausted,
    No,
    OracleBudget,
    Yes,
    candidate_branch_sets,
    decide_immersion,
    sampled_mindegree_property,
    symmetry_classes,
)
from oracles import immersion_exists


def cycle(n):
    return MultiGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_clique_immerses_itself():
    for t in range(1, 6):
        out = decide_immersion(complete(t), t, strong=True)
        assert isinstance(out, Yes) and verify_strong_immersion(complete(t), out.certificate)


def test_c5_contains_k3():
    out = decide_immersion(cycle(5), 3, strong=True)
    assert isinstance(out, Yes)
    assert sum(len(p) - 1 for p in out.certificate.paths.values()) == 5


@pytest.mark.parametrize("strong", [False, True])
@pytest.mark.parametrize("symmetry", [False, True])
def test_k3333_has_no_k10(strong, symmetry):
    out = decide_immersion(seymour12(), 10, strong=strong, symmetry=symmetry)
    assert isinstance(out, No)


def test_k3333_has_k9():
    assert isinstance(decide_immersion(seymour12(), 9, strong=True), Yes)


def test_parallel_jobs_agree():
    assert isinstance(decide_immersion(seymour12(), 10, jobs=3), No)
    out = decide_immersion(complete(7), 6, jobs=3)
    assert isinstance(out, Yes) and verify_strong_immersion(complete(7), out.certificate, strong=False)


def test_tiny_budget_exhausts():
    out = decide_immersion(seymour12(), 10, budget=OracleBudget(max_nodes=5))
    assert isinstance(out, Exhausted) and out.nodes <= 6


def test_budget_and_input_errors():
    with pytest.raises(BadParams):
        OracleBudget(max_nodes=0)
    with pytest.raises(BadParams):
        decide_immersion(complete(3), 0)
    with pytest.raises(NotSimple):
        decide_immersion(MultiGraph.from_edges(2, [(0, 1), (0, 1)]), 2)


def test_too_few_high_degree_vertices():
    star = MultiGraph.from_edges(5, [(0, i) for i in range(1, 5)])
    assert candidate_branch_sets(star, 3) == []
    assert isinstance(decide_immersion(star, 3), No)


def test_symmetry_classes_cover_orbits():
    sets = candidate_branch_sets(cycle(6), 3)
    reps = symmetry_classes(cycle(6), sets)
    # triples on C6 up to rotation and reflection: consecutive, 2+1 gap, alternating
    assert len(reps) == 3 and set(reps) <= set(sets)


def test_sample_report():
    empty = sampled_mindegree_property(5, 8, 0)
    assert (empty.samples, empty.yes, empty.no, empty.exhausted) == (0, 0, 0, 0)
    assert empty.exhausted_rate == 0.0
    rep = sampled_mindegree_property(5, 8, 15, seed=3)
    assert rep.yes + rep.no + rep.exhausted == 15
    assert rep.no == 0 and rep.as_dict()["samples"] == 15


@st.composite
def small_graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return MultiGraph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.integers(1, 4), st.booleans())
def test_matches_brute_force(g, t, strong):
    out = decide_immersion(g, t, strong=strong)
    assert not isinstance(out, Exhausted)
    assert isinstance(out, Yes) == immersion_exists(g, t, strong)
    if isinstance(out, Yes):
        assert verify_strong_immersion(g, out.certificate, strong=strong)


@settings(max_examples=80, deadline=None)
@given(small_graphs(7), st.integers(2, 5), st.integers(0, 10**6))
def test_adding_an_edge_keeps_yes(g, t, pick):
    out = decide_immersion(g, t, strong=True)
    missing = [(u, v) for u, v in itertools.combinations(g.vertices(), 2) if not g.has_edge(u, v)]
    if not isinstance(out, Yes) or not missing:
        return
    h = g.copy()
    h.add_edge(*missing[pick % len(missing)])
    assert isinstance(decide_immersion(h, t, strong=True), Yes)


@settings(max_examples=40, deadline=None)
@given(small_graphs(7), st.integers(2, 5))
def test_symmetry_does_not_change_the_answer(g, t):
    a = decide_immersion(g, t)
    b = decide_immersion(g, t, symmetry=True)
    assert type(a) is type(b)


def test_strong_is_harder_than_weak():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(4, 7)
        g = MultiGraph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.55])
        for t in (3, 4):
            if isinstance(decide_immersion(g, t, strong=True), Yes):
                assert isinstance(decide_immersion(g, t), Yes)
