"""Seeded instance families."""

from __future__ import annotations

import inspect
import random
from itertools import combinations
from typing import Callable, Sequence

import networkx as nx

from .errors import BadParams
from .multigraph import MultiGraph


def _from_nx(G: nx.Graph) -> MultiGraph:
    G = nx.convert_node_labels_to_integers(G, ordering="sorted")
    return MultiGraph.from_edges(G.number_of_nodes(), sorted(tuple(sorted(e)) for e in G.edges()))


def complete(n: int) -> MultiGraph:
    if n < 0:
        raise BadParams("n must be non-negative")
    return MultiGraph.from_edges(n, combinations(range(n), 2))


def complete_multipartite(parts: Sequence[int]) -> MultiGraph:
    if any(p < 0 for p in parts):
        raise BadParams("part sizes must be non-negative")
    label = [k for k, size in enumerate(parts) for _ in range(size)]
    return MultiGraph.from_edges(
        len(label), [(u, v) for u, v in combinations(range(len(label)), 2) if label[u] != label[v]]
    )


def seymour12() -> MultiGraph:
    """K_12 with the edges of four vertex-disjoint triangles removed."""
    g = complete(12)
    for base in range(0, 12, 3):
        for u, v in combinations(range(base, base + 3), 2):
            g.remove_edge(g.edges_between(u, v)[0])
    return MultiGraph.from_edges(12, g.canonical_edge_list())


def ktt(t: int) -> MultiGraph:
    return complete_multipartite([t, t])


def random_regular(n: int, d: int, seed: int = 0) -> MultiGraph:
    if not (0 <= d < n) or (n * d) % 2:
        raise BadParams(f"no {d}-regular graph on {n} vertices")
    return _from_nx(nx.random_regular_graph(d, n, seed=seed))


def two_blocks_thin_cut(block: int, degree: int, bridges: int = 2, seed: int = 0) -> MultiGraph:
    """Two random ``degree``-regular blocks joined by ``bridges`` disjoint edges."""
    if bridges > block:
        raise BadParams("more bridges than vertices in a block")
    g1 = random_regular(block, degree, seed)
    g2 = random_regular(block, degree, seed + 1)
    edges = g1.canonical_edge_list() + [(u + block, v + block) for u, v in g2.canonical_edge_list()]
    rng = random.Random(seed)
    left = rng.sample(range(block), bridges)
    right = rng.sample(range(block, 2 * block), bridges)
    edges += [(u, v) for u, v in zip(left, right)]
    return MultiGraph.from_edges(2 * block, edges)


def random_min_degree(n: int, delta: int, seed: int = 0, p: float = 0.5) -> MultiGraph:
    """G(n, p) topped up with random edges until the minimum degree is at least ``delta``."""
    if not (0 <= delta < n):
        raise BadParams(f"minimum degree {delta} impossible on {n} vertices")
    rng = random.Random(seed)
    adj = {v: set() for v in range(n)}
    for u, v in combinations(range(n), 2):
        if rng.random() < p:
            adj[u].add(v)
            adj[v].add(u)
    while True:
        low = [v for v in range(n) if len(adj[v]) < delta]
        if not low:
            break
        v = rng.choice(low)
        w = rng.choice(sorted(set(range(n)) - adj[v] - {v}))
        adj[v].add(w)
        adj[w].add(v)
    return MultiGraph.from_edges(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


FAMILIES: dict[str, Callable[..., MultiGraph]] = {
    "complete": complete,
    "complete_multipartite": complete_multipartite,
    "seymour12": seymour12,
    "ktt": ktt,
    "random_regular": random_regular,
    "two_blocks_thin_cut": two_blocks_thin_cut,
    "random_min_degree": random_min_degree,
}


def gen(family: str, params: dict | None = None, seed: int = 0) -> MultiGraph:
    """Build a family member; ``seed`` is passed to the families that take one."""
    try:
        fn = FAMILIES[family]
    except KeyError:
        raise BadParams(f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}") from None
    params = dict(params or {})
    sig = inspect.signature(fn)
    if "seed" in sig.parameters:
        params.setdefault("seed", seed)
    try:
        sig.bind(**params)
    except TypeError as exc:
        raise BadParams(f"{family}: {exc}") from None
    return fn(**params)
