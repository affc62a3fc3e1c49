"""Cardinality matchings in general graphs and the structure built on them.

Graphs are given either as a simple ``MultiGraph`` or as an adjacency
mapping ``{vertex: iterable of neighbours}`` over sortable vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import HallViolated, InvariantBreach, NotSimple, PreconditionViolated
from . import multigraph as _mg
from .multigraph import MultiGraph

Pair = tuple


def _as_adj(g) -> dict:
    if isinstance(g, MultiGraph):
        if not g.is_simple():
            raise NotSimple("matching routines need a simple graph")
        return g.adjacency()
    return {v: set(nb) for v, nb in g.items()}


class _Indexed:
    """Dense 0..n-1 relabelling of an adjacency mapping (sorted order)."""

    def __init__(self, adj: Mapping):
        self.order = sorted(adj)
        self.index = {v: i for i, v in enumerate(self.order)}
        self.n = len(self.order)
        self.adj = [sorted(self.index[u] for u in adj[v] if u != v) for v in self.order]

    def pairs(self, mate: Sequence[int]) -> list[Pair]:
        out = []
        for i, j in enumerate(mate):
            if j > i:
                out.append((self.order[i], self.order[j]))
        return out


def _find_augmenting(adj: list[list[int]], mate: list[int], root: int, banned: frozenset = frozenset()) -> bool:
    """Edmonds' blossom search from the exposed vertex ``root``; augments in place."""
    n = len(adj)
    parent = [-1] * n
    base = list(range(n))
    used = [False] * n
    used[root] = True
    q = deque([root])

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int, blossom: list[bool]) -> None:
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    while q:
        v = q.popleft()
        for to in adj[v]:
            if to in banned or base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                cur = lca(v, to)
                blossom = [False] * n
                mark_path(v, cur, to, blossom)
                mark_path(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            q.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if mate[to] == -1:
                    x = to
                    while x != -1:
                        px = parent[x]
                        nxt = mate[px]
                        mate[x] = px
                        mate[px] = x
                        x = nxt
                    return True
                used[mate[to]] = True
                q.append(mate[to])
    return False


def _max_mate(adj: list[list[int]], banned: frozenset = frozenset()) -> list[int]:
    n = len(adj)
    mate = [-1] * n
    for v in range(n):
        if v in banned or mate[v] != -1:
            continue
        for u in adj[v]:
            if mate[u] == -1 and u not in banned:
                mate[u] = v
                mate[v] = u
                break
    for v in range(n):
        if v not in banned and mate[v] == -1:
            _find_augmenting(adj, mate, v, banned)
    return mate


def maximum_matching(g) -> list[Pair]:
    """Maximum cardinality matching as a sorted list of vertex pairs."""
    ix = _Indexed(_as_adj(g))
    return ix.pairs(_max_mate(ix.adj))


def perfect_matching(g) -> list[Pair] | None:
    ix = _Indexed(_as_adj(g))
    mate = _max_mate(ix.adj)
    if any(m == -1 for m in mate):
        return None
    return ix.pairs(mate)


def is_matching(pairs: Iterable[Pair], adj: Mapping | None = None) -> bool:
    seen = set()
    for u, v in pairs:
        if u == v or u in seen or v in seen:
            return False
        if adj is not None and v not in adj[u]:
            return False
        seen.update((u, v))
    return True


def _mate_without(adj: list[list[int]], mate: list[int], v: int) -> list[int] | None:
    """A maximum matching of G - v of the same size as ``mate``, if one exists."""
    m = list(mate)
    u = m[v]
    if u == -1:
        m[v] = -1
        return m
    m[v] = -1
    m[u] = -1
    if _find_augmenting(adj, m, u, frozenset((v,))):
        return m
    return None


@dataclass
class Hypomatchability:
    """Outcome of a hypomatchability test; ``witness(v)`` is a perfect matching of G - v."""

    value: bool
    failing: Hashable | None = None
    _witnesses: dict = field(default_factory=dict, repr=False)

    def __bool__(self) -> bool:
        return self.value

    def witness(self, v) -> list[Pair]:
        return self._witnesses[v]


def is_hypomatchable(g) -> Hypomatchability:
    adj = _as_adj(g)
    ix = _Indexed(adj)
    n = ix.n
    if n == 0:
        return Hypomatchability(False)
    mate = _max_mate(ix.adj)
    size = sum(1 for m in mate if m != -1) // 2
    if n % 2 == 0 or size != (n - 1) // 2:
        return Hypomatchability(False, ix.order[0])
    witnesses = {}
    for i, v in enumerate(ix.order):
        m = _mate_without(ix.adj, mate, i)
        if m is None:
            return Hypomatchability(False, v, witnesses)
        witnesses[v] = ix.pairs(m)
    return Hypomatchability(True, None, witnesses)


def perfect_matching_without(g, v) -> list[Pair] | None:
    ix = _Indexed(_as_adj(g))
    mate = _max_mate(ix.adj)
    m = _mate_without(ix.adj, mate, ix.index[v])
    if m is None or sum(1 for x in m if x == -1) != 1:
        return None
    return ix.pairs(m)


# -- Gallai-Edmonds -------------------------------------------------------


@dataclass(frozen=True)
class EdmondsGallaiCover:
    """A set T and a matching M of size |T| into distinct hypomatchable components of G - T."""

    T: frozenset
    components: tuple[frozenset, ...]
    M: tuple[Pair, ...]


def gallai_edmonds_sets(g) -> tuple[set, set, set]:
    """Classical ``(D, A, C)``: D = vertices missed by some maximum matching."""
    adj = _as_adj(g)
    ix = _Indexed(adj)
    mate = _max_mate(ix.adj)
    D = set()
    for i in range(ix.n):
        if mate[i] == -1 or _mate_without(ix.adj, mate, i) is not None:
            D.add(ix.order[i])
    A = {u for v in D for u in adj[v] if u not in D}
    C = set(adj) - D - A
    return D, A, C


def _components(adj: Mapping, vs: set) -> list[frozenset]:
    seen = set()
    out = []
    for s in sorted(vs):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in vs and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(frozenset(comp))
    return out


def _induced(adj: Mapping, vs: set) -> dict:
    return {v: {u for u in adj[v] if u in vs} for v in vs}


def _barrier(adj: dict) -> set:
    """A barrier whose removal leaves only hypomatchable components."""
    if not adj:
        return set()
    D, A, C = gallai_edmonds_sets(adj)
    T = set(A)
    for comp in _components(adj, C):
        x = min(comp)
        rest = set(comp) - {x}
        T.add(x)
        T |= _barrier(_induced(adj, rest))
    return T


def edmonds_gallai(g, *, validate: bool | None = None) -> EdmondsGallaiCover:
    """Set T and matching M with every component of G - T hypomatchable.

    T is grown from the Gallai-Edmonds set A(G): inside the perfectly
    matchable part, the lowest vertex of each component joins T and the
    construction recurses on what is left of that component.
    """
    adj = _as_adj(g)
    T = _barrier(adj)
    rest = set(adj) - T
    comps = tuple(_components(adj, rest))
    owner = {v: k for k, c in enumerate(comps) for v in c}
    M = tuple(
        (u, v) for u, v in maximum_matching(adj)
        if (u in T) != (v in T)
    )
    cover = EdmondsGallaiCover(frozenset(T), comps, M)
    if validate or (validate is None and _mg.CHECK_INVARIANTS):
        problems = check_cover(adj, cover)
        if problems:
            raise InvariantBreach("edmonds_gallai", "; ".join(problems))
    elif len(M) != len(T) or len({owner[v if u in T else u] for u, v in M}) != len(M):
        raise InvariantBreach("edmonds_gallai", "matching does not cover T into distinct components")
    return cover


def check_cover(g, cover: EdmondsGallaiCover) -> list[str]:
    """All violated clauses of the cover invariants (empty list when valid)."""
    adj = _as_adj(g)
    problems = []
    T = set(cover.T)
    rest = set(adj) - T
    comps = _components(adj, rest)
    if sorted(map(sorted, comps)) != sorted(map(sorted, cover.components)):
        problems.append("components are not those of G - T")
    for c in cover.components:
        if not is_hypomatchable(_induced(adj, set(c))):
            problems.append(f"component {sorted(c)} is not hypomatchable")
    if len(cover.M) != len(T):
        problems.append("|M| != |T|")
    if not is_matching(cover.M, adj):
        problems.append("M is not a matching of G")
    owner = {v: k for k, c in enumerate(cover.components) for v in c}
    hit = []
    for u, v in cover.M:
        if (u in T) == (v in T):
            problems.append(f"edge {(u, v)} does not have exactly one end in T")
            continue
        hit.append(owner[v if u in T else u])
    if len(hit) != len(set(hit)):
        problems.append("two M-edges end in the same component")
    return problems


# -- match structure ------------------------------------------------------


@dataclass(frozen=True)
class PerfectMatching:
    M: tuple[Pair, ...]


@dataclass(frozen=True)
class Hypomatchable:
    info: Hypomatchability

    def without(self, v) -> list[Pair]:
        return self.info.witness(v)


@dataclass(frozen=True)
class Cover:
    cover: EdmondsGallaiCover


MatchStructure = PerfectMatching | Hypomatchable | Cover


def match_structure(g) -> MatchStructure:
    adj = _as_adj(g)
    pm = perfect_matching(adj)
    if pm is not None:
        return PerfectMatching(tuple(pm))
    h = is_hypomatchable(adj)
    if h:
        return Hypomatchable(h)
    return Cover(edmonds_gallai(adj))


@dataclass(frozen=True)
class SmallCover:
    W: frozenset
    T: frozenset


@dataclass(frozen=True)
class MultipartiteWitness:
    parts: tuple[frozenset, ...]


def complement_adj(adj: Mapping) -> dict:
    vs = set(adj)
    return {v: vs - set(adj[v]) - {v} for v in adj}


def small_cover_or_witness(h, tau: int) -> SmallCover | MultipartiteWitness:
    """Either a large complete multipartite subgraph of ``h`` or a small dense set W.

    The complement of ``h`` must have neither a perfect matching nor be
    hypomatchable.  With C_1..C_k the components of comp(h) - T, ``h`` contains
    the complete multipartite graph on V(C_1)..V(C_k).  If its minimum degree
    is at least ``tau`` the parts are returned; otherwise W is the union of
    all parts but a largest one.
    """
    adj = _as_adj(h)
    co = complement_adj(adj)
    st = match_structure(co)
    if not isinstance(st, Cover):
        raise PreconditionViolated("complement is perfectly matchable or hypomatchable")
    cover = st.cover
    parts = tuple(sorted(cover.components, key=min))
    total = sum(len(p) for p in parts)
    biggest = max(range(len(parts)), key=lambda k: (len(parts[k]), -k))
    if total - len(parts[biggest]) >= tau:
        return MultipartiteWitness(parts)
    W = frozenset().union(*(p for k, p in enumerate(parts) if k != biggest))
    out = SmallCover(W, cover.T)
    problems = check_small_cover(adj, out, tau)
    if problems:
        raise InvariantBreach("small_cover_or_witness", "; ".join(problems))
    return out


def check_small_cover(h, sc: SmallCover, tau: int) -> list[str]:
    """The three conclusions about W, checked literally."""
    adj = _as_adj(h)
    n = len(adj)
    W, T = set(sc.W), set(sc.T)
    problems = []
    if not W:
        problems.append("W is empty")
    if W & T:
        problems.append("W meets T")
    if not (len(T) <= len(W) <= tau - 1):
        problems.append(f"size chain |T|={len(T)} <= |W|={len(W)} <= {tau - 1} fails")
    outside = set(adj) - T - W
    for w in sorted(W):
        if len(adj[w]) < n - tau:
            problems.append(f"{w} has degree {len(adj[w])} < {n - tau}")
        missing = outside - set(adj[w])
        if missing:
            problems.append(f"{w} misses {sorted(missing)[:3]} outside T and W")
    return problems


def is_complete_multipartite_subgraph(adj: Mapping, parts: Sequence[Iterable]) -> bool:
    parts = [set(p) for p in parts]
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            for u in parts[a]:
                if not parts[b] <= set(adj[u]):
                    return False
    return True


# -- bipartite ------------------------------------------------------------


def hall_injection(S: Sequence, neighbors: Callable[[Hashable], Iterable] | Mapping) -> dict:
    """Injective ``g`` on ``S`` with ``g(v)`` a neighbour of ``v`` (Kuhn's augmenting paths)."""
    nb = neighbors if callable(neighbors) else neighbors.__getitem__
    cand = {s: sorted(nb(s)) for s in S}
    owner: dict = {}
    assign: dict = {}

    def try_assign(s, seen: set) -> bool:
        for x in cand[s]:
            if x in seen:
                continue
            seen.add(x)
            if x not in owner or try_assign(owner[x], seen):
                owner[x] = s
                assign[s] = x
                return True
        return False

    for s in S:
        seen: set = set()
        if not try_assign(s, seen):
            # S-vertices reachable by alternating paths violate Hall's condition
            reach = {s} | {owner[x] for x in seen if x in owner}
            raise HallViolated(
                f"no system of distinct representatives: {len(reach)} vertices see "
                f"only {len(seen)} candidates",
                sorted(reach),
            )
    return assign
