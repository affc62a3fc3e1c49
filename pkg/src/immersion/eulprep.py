"""Preprocessing: bounded degrees, a well connected core, and Eulerian parity.

Every stage takes a graph with its derivation log and returns a new graph
(the input is never mutated); the log records how the new graph arises from
the root by splits and deletions.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .certify import ImmersionCertificate
from .dense import immerse_complete_multipartite
from .errors import InvariantBreach, OddTotal, PreconditionViolated, TargetUnreached
from .matchings import (
    Cover,
    Hypomatchable,
    MultipartiteWitness,
    PerfectMatching,
    complement_adj,
    hall_injection,
    match_structure,
    small_cover_or_witness,
)
from .multigraph import DerivationLog, MultiGraph, boundary_size, delete_edge, delete_vertex, split_off


@dataclass
class Prepared:
    graph: MultiGraph
    log: DerivationLog
    events: list[str] = field(default_factory=list)


@dataclass
class ImmersionFound:
    graph: MultiGraph
    log: DerivationLog
    certificate: ImmersionCertificate
    events: list[str] = field(default_factory=list)


PrepOutcome = Prepared | ImmersionFound


# -- edge connectivity ----------------------------------------------------


def find_small_cut(g: MultiGraph, X: Iterable[int], k: int) -> set[int] | None:
    """A side of some cut of ``g[X]`` with fewer than ``k`` edges, or None.

    Maximum-adjacency orderings on a contracted weighted graph.  Edges whose
    scan label reaches ``k`` join endpoints with local connectivity at least
    ``k`` and are contracted; the last two vertices of each ordering are
    merged when their phase cut is at least ``k``.  A cut below ``k`` is never
    crossed by a contracted edge, so it is eventually reported as a phase cut.
    """
    xs = set(X)
    if len(xs) <= 1:
        return None
    members: dict[int, set[int]] = {v: {v} for v in xs}
    w: dict[int, dict[int, int]] = {}
    for v in xs:
        row = {}
        for u, c in g._nbr[v].items():
            if u != v and u in xs:
                row[u] = c
        w[v] = row

    while len(w) > 1:
        parent = {v: v for v in w}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        start = min(w)
        attach = {v: 0 for v in w}
        visited: set[int] = set()
        heap = [(0, start)]
        order = []
        merged_any = False
        while len(visited) < len(w):
            if not heap:
                heap.append((0, min(set(w) - visited)))
            neg, v = heapq.heappop(heap)
            if v in visited or -neg != attach[v]:
                continue
            visited.add(v)
            order.append(v)
            for u, c in w[v].items():
                if u in visited:
                    continue
                attach[u] += c
                if attach[u] >= k and find(u) != find(v):
                    parent[find(u)] = find(v)
                    merged_any = True
                heapq.heappush(heap, (-attach[u], u))
        last = order[-1]
        if attach[last] < k:
            return set(members[last])
        if not merged_any:
            a = find(order[-2])
            parent[a] = find(last)
        # contract along the union-find classes
        groups: dict[int, list[int]] = {}
        for v in w:
            groups.setdefault(find(v), []).append(v)
        rep = {v: min(vs) for vs in groups.values() for v in vs}
        new_w: dict[int, dict[int, int]] = {}
        new_members: dict[int, set[int]] = {}
        for v, row in w.items():
            r = rep[v]
            new_members.setdefault(r, set()).update(members[v])
            nrow = new_w.setdefault(r, {})
            for u, c in row.items():
                ru = rep[u]
                if ru != r:
                    nrow[ru] = nrow.get(ru, 0) + c
        w, members = new_w, new_members
    return None


def edge_connectivity_at_least(g: MultiGraph, X: Iterable[int], k: int) -> bool:
    return find_small_cut(g, X, k) is None


def well_connected_core(g: MultiGraph, d: int) -> set[int]:
    """Non-empty X with |boundary(X)| < d and g[X] (d/2)-edge-connected.

    Starts from X = V and, while g[X] has a cut below d/2, replaces X by the
    side of that cut whose boundary in g stays below d.
    """
    if d <= 0 or d % 2:
        raise PreconditionViolated("d must be a positive even integer")
    if g.num_vertices == 0 or g.min_degree() < d:
        raise PreconditionViolated(f"minimum degree must be at least {d}")
    half = d // 2
    X = set(g.vertices())
    while True:
        side = find_small_cut(g, X, half)
        if side is None:
            break
        other = X - side
        b1, b2 = boundary_size(g, side), boundary_size(g, other)
        cands = [(b, len(s), min(s), s) for b, s in ((b1, side), (b2, other)) if b < d]
        if not cands:
            raise InvariantBreach("connsg", "neither side of a small cut has boundary below d")
        X = min(cands, key=lambda c: c[:3])[3]
    if boundary_size(g, X) >= d:
        raise InvariantBreach("connsg", "core boundary is not below d")
    return X


# -- near regular ---------------------------------------------------------


def near_regularize(g: MultiGraph, log: DerivationLog, d: int, t: int) -> PrepOutcome:
    """Strongly immersed graph with degrees in [d-1, d+t], or a K_t immersion.

    Edges whose both ends exceed degree d are deleted; each remaining vertex
    of degree > d+t is split off along a perfect matching of the complement
    of its neighbourhood (or of that complement minus its Hall partner, whose
    edge is then dropped).
    """
    if not g.is_simple():
        raise PreconditionViolated("near_regularize needs a simple graph")
    if g.min_degree() < d:
        raise PreconditionViolated(f"minimum degree must be at least {d}")
    g = g.copy()
    child = log.fork()
    for e, u, v in list(g.edges()):
        if g.degree(u) > d and g.degree(v) > d:
            delete_edge(g, child, e)
    for e, u, v in g.edges():
        if g.degree(u) > d and g.degree(v) > d:
            raise InvariantBreach("nearreg", f"edge {e} still deletable after one pass")
    S = [v for v in g.vertices() if g.degree(v) >= d + t + 1]
    Sset = set(S)
    for v in S:
        if g.neighbor_set(v) & Sset:
            raise InvariantBreach("nearreg", "high-degree vertices are not independent")
    partner = hall_injection(S, g.neighbor_set)
    for v in S:
        nb = g.neighbors(v)
        nbs = set(nb)
        H = {x: g.neighbor_set(x) & nbs for x in nb}
        st = match_structure(complement_adj(H))
        if isinstance(st, PerfectMatching):
            M, leftover = st.M, None
        elif isinstance(st, Hypomatchable):
            M, leftover = st.without(partner[v]), partner[v]
        else:
            res = small_cover_or_witness(H, t)
            if not isinstance(res, MultipartiteWitness):
                raise InvariantBreach("nearreg", f"neighbourhood of {v} yields a small cover")
            cert = immerse_complete_multipartite(g, child, res.parts, t)
            log.commit(child)
            return ImmersionFound(g, log, cert)
        for x, y in M:
            split_off(g, child, g.edges_between(v, x)[0], g.edges_between(v, y)[0], v)
        if leftover is not None:
            delete_edge(g, child, g.edges_between(v, leftover)[0])
        if g.degree(v) != 0:
            raise InvariantBreach("nearreg", f"vertex {v} not fully split off")
        delete_vertex(g, child, v)
    lo, hi = g.min_degree(), g.max_degree()
    if g.num_vertices and (lo < d - 1 or hi > d + t):
        raise InvariantBreach("nearreg", f"degrees span [{lo}, {hi}], expected within [{d - 1}, {d + t}]")
    log.commit(child)
    return Prepared(g, log)


# -- spanning trees -------------------------------------------------------


def _tree_degrees(tadj: Mapping[int, set[int]]) -> dict[int, int]:
    return {v: len(s) for v, s in tadj.items()}


def _improve(adj: Mapping[int, set[int]], tadj: dict[int, set[int]], k: int) -> None:
    """Local degree-reducing swaps until max degree <= k or no swap applies."""
    while True:
        deg = _tree_degrees(tadj)
        high = sorted((v for v in deg if deg[v] > k), key=lambda v: (-deg[v], v))
        if not high:
            return
        for w in high:
            if _swap_at(adj, tadj, w, deg):
                break
        else:
            return


def _swap_at(adj, tadj, w: int, deg: dict[int, int]) -> bool:
    label = {w: -1}
    for c in sorted(tadj[w]):
        label[c] = c
        q = deque([c])
        while q:
            x = q.popleft()
            for y in tadj[x]:
                if y not in label:
                    label[y] = c
                    q.append(y)
    limit = deg[w] - 2
    best = None
    for x in sorted(adj):
        if x == w or deg[x] > limit:
            continue
        for y in adj[x]:
            if y == w or y <= x or deg[y] > limit or label[x] == label[y] or y in tadj[x]:
                continue
            key = (max(deg[x], deg[y]), deg[x] + deg[y], x, y)
            if best is None or key < best[0]:
                best = (key, x, y)
    if best is None:
        return False
    _, x, y = best
    c = label[x]
    tadj[w].discard(c)
    tadj[c].discard(w)
    tadj[x].add(y)
    tadj[y].add(x)
    return True


def _bfs_tree(adj: Mapping[int, set[int]], root: int) -> dict[int, set[int]]:
    tadj = {v: set() for v in adj}
    seen = {root}
    q = deque([root])
    while q:
        x = q.popleft()
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                tadj[x].add(y)
                tadj[y].add(x)
                q.append(y)
    return tadj


def _random_dfs_tree(adj: Mapping[int, set[int]], rng: random.Random) -> dict[int, set[int]]:
    vs = sorted(adj)
    root = rng.choice(vs)
    tadj = {v: set() for v in adj}
    seen = {root}
    stack = [(root, iter(rng.sample(sorted(adj[root]), len(adj[root]))))]
    while stack:
        x, it = stack[-1]
        for y in it:
            if y not in seen:
                seen.add(y)
                tadj[x].add(y)
                tadj[y].add(x)
                stack.append((y, iter(rng.sample(sorted(adj[y]), len(adj[y])))))
                break
        else:
            stack.pop()
    return tadj


def _exhaustive_tree(adj: Mapping[int, set[int]], k: int, budget: int) -> dict[int, set[int]] | None:
    vs = sorted(adj)
    tadj: dict[int, set[int]] = {v: set() for v in vs}
    inside = {vs[0]}
    nodes = 0

    def grow() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return False
        if len(inside) == len(vs):
            return True
        best = None
        for v in vs:
            if v in inside:
                continue
            hooks = [u for u in adj[v] if u in inside and len(tadj[u]) < k]
            if best is None or len(hooks) < len(best[1]):
                best = (v, hooks)
        v, hooks = best
        for u in sorted(hooks, key=lambda u: len(tadj[u])):
            tadj[u].add(v)
            tadj[v].add(u)
            inside.add(v)
            if grow():
                return True
            inside.discard(v)
            tadj[u].discard(v)
            tadj[v].discard(u)
        return False

    return tadj if grow() else None


def _tree_edges(tadj: Mapping[int, set[int]]) -> list[tuple[int, int]]:
    return sorted((u, v) for u in tadj for v in tadj[u] if u < v)


def bounded_degree_spanning_tree(
    g: MultiGraph,
    k: int,
    *,
    seed: int = 0,
    restarts: int = 32,
    exhaustive_limit: int = 64,
    exhaustive_budget: int = 200_000,
) -> list[tuple[int, int]]:
    """Spanning tree of maximum degree at most ``k`` as a sorted edge list.

    BFS tree from the lowest vertex, improved by degree-reducing swaps; then
    seeded random DFS restarts; then an exhaustive search on small graphs.
    Raises ``TargetUnreached`` carrying the best tree found.
    """
    adj = g.adjacency()
    if not adj:
        return []
    if not g.is_connected():
        raise PreconditionViolated("graph is not connected")
    tadj = _bfs_tree(adj, min(adj))
    _improve(adj, tadj, k)
    best = tadj
    best_deg = max(_tree_degrees(tadj).values())
    if best_deg <= k:
        return _tree_edges(tadj)
    rng = random.Random(seed)
    for _ in range(restarts):
        tadj = _random_dfs_tree(adj, rng)
        _improve(adj, tadj, k)
        deg = max(_tree_degrees(tadj).values())
        if deg < best_deg:
            best, best_deg = tadj, deg
        if deg <= k:
            return _tree_edges(tadj)
    if len(adj) <= exhaustive_limit:
        tadj = _exhaustive_tree(adj, k, exhaustive_budget)
        if tadj is not None:
            return _tree_edges(tadj)
    raise TargetUnreached(
        f"no spanning tree of maximum degree {k} found (best {best_deg})",
        _tree_edges(best),
        best_deg,
    )


def check_spanning_tree(g: MultiGraph, edges: Sequence[tuple[int, int]], k: int) -> list[str]:
    problems = []
    vs = g.vertices()
    if len(edges) != max(len(vs) - 1, 0):
        problems.append(f"{len(edges)} edges for {len(vs)} vertices")
    tadj: dict[int, set[int]] = {v: set() for v in vs}
    for u, v in edges:
        if not g.has_edge(u, v):
            problems.append(f"({u}, {v}) is not an edge")
            continue
        tadj[u].add(v)
        tadj[v].add(u)
    if vs:
        seen = {vs[0]}
        stack = [vs[0]]
        while stack:
            x = stack.pop()
            for y in tadj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(vs):
            problems.append("not spanning/connected")
    if any(len(s) > k for s in tadj.values()):
        problems.append(f"maximum degree exceeds {k}")
    return problems


# -- parity ---------------------------------------------------------------


def parity_forest(tree: Sequence[tuple[int, int]], f: Mapping[int, int]) -> list[tuple[int, int]]:
    """Edges T' of the forest ``tree`` with deg_{T'}(v) = f(v) mod 2 for all v.

    Leaves are processed first: a vertex whose parity is still wrong takes
    the edge to its parent.
    """
    if sum(f.values()) % 2:
        raise OddTotal("target parities sum to an odd number")
    tadj: dict[int, list[int]] = {v: [] for v in f}
    for u, v in tree:
        tadj.setdefault(u, []).append(v)
        tadj.setdefault(v, []).append(u)
    seen: set[int] = set()
    chosen: list[tuple[int, int]] = []
    for root in sorted(tadj):
        if root in seen:
            continue
        order, parent = [], {root: None}
        seen.add(root)
        stack = [root]
        while stack:
            x = stack.pop()
            order.append(x)
            for y in sorted(tadj[x]):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    stack.append(y)
        par = {v: 0 for v in order}
        for v in reversed(order):
            p = parent[v]
            if p is None:
                if par[v] != f.get(v, 0) % 2:
                    raise OddTotal(f"component of {root} has an odd parity total")
                continue
            if par[v] != f.get(v, 0) % 2:
                chosen.append((min(v, p), max(v, p)))
                par[v] ^= 1
                par[p] ^= 1
    return sorted(chosen)


# -- pipeline -------------------------------------------------------------


def eulerianize(
    g: MultiGraph,
    log: DerivationLog,
    d: int,
    t: int,
    *,
    tree_fallback: str = "strict5",
    seed: int = 0,
) -> PrepOutcome:
    """Eulerian graph strongly immersed in ``g`` with deficiency sum below ``d``.

    Chain: near regular graph (target d+6) -> well connected core -> spanning
    tree of maximum degree 5 -> delete a parity forest of that tree.  With
    ``tree_fallback="allow6"`` a degree-6 tree is accepted by rerunning the
    chain with target d+7, which needs input minimum degree d+7.
    """
    if d % 2 or d < 2 * t + 12:
        raise PreconditionViolated("d must be even and at least 2t + 12")
    if g.min_degree() < d + 6:
        raise PreconditionViolated(f"minimum degree must be at least {d + 6}")
    try:
        return _eulerianize(g, log, d, t, 6, seed, tree_degree=5)
    except TargetUnreached as exc:
        if tree_fallback != "allow6" or (exc.best_degree or 99) > 6 or g.min_degree() < d + 7:
            raise
    out = _eulerianize(g, log, d, t, 7, seed, tree_degree=6)
    out.events.insert(0, "tree_fallback")
    return out


def _eulerianize(g, log, d, t, slack, seed, tree_degree) -> PrepOutcome:
    child = log.fork()
    res = near_regularize(g, child, d + slack, t)
    if isinstance(res, ImmersionFound):
        log.commit(child)
        return ImmersionFound(res.graph, log, res.certificate)
    h = res.graph
    X = well_connected_core(h, d)
    for v in h.vertices():
        if v not in X:
            delete_vertex(h, child, v)
    tree = bounded_degree_spanning_tree(h, tree_degree, seed=seed)
    f = {v: h.degree(v) % 2 for v in h.vertices()}
    for u, v in parity_forest(tree, f):
        delete_edge(h, child, h.edges_between(u, v)[0])
    if not h.is_eulerian():
        raise InvariantBreach("eul", "output has an odd degree vertex")
    if h.deficiency_sum(d) >= d:
        raise InvariantBreach("eul", f"deficiency sum {h.deficiency_sum(d)} >= {d}")
    log.commit(child)
    return Prepared(h, log)
