"""Clique immersions in locally dense structure.

Both constructions work in place on a ``MultiGraph`` plus its derivation log
and return a certificate on the resulting derived graph, in which the branch
vertices are pairwise adjacent.
"""

from __future__ import annotations

from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .certify import ImmersionCertificate, clique_certificate
from .errors import Infeasible, InvariantBreach, PreconditionViolated
from .multigraph import DerivationLog, MultiGraph, split_off

Pair = tuple[int, int]


def list_edge_coloring(
    edges: Sequence[Pair], lists: Mapping[Pair, Iterable[Hashable]]
) -> dict[Pair, Hashable]:
    """Proper edge colouring with every colour taken from the edge's own list.

    Exact backtracking: always branch on the edge with the fewest colours
    still available, trying colours in increasing order.
    """
    edges = [tuple(e) for e in edges]
    avail = {e: sorted(set(lists[e])) for e in edges}
    used: dict[Hashable, set] = {}
    for u, v in edges:
        used.setdefault(u, set())
        used.setdefault(v, set())
    colour: dict[Pair, Hashable] = {}
    todo = set(edges)

    def options(e: Pair) -> list:
        u, v = e
        bad = used[u] | used[v]
        return [c for c in avail[e] if c not in bad]

    def search() -> bool:
        if not todo:
            return True
        best, best_opts = None, None
        for e in sorted(todo):
            opts = options(e)
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = e, opts
                if not opts:
                    return False
        todo.discard(best)
        u, v = best
        for c in best_opts:
            colour[best] = c
            used[u].add(c)
            used[v].add(c)
            if search():
                return True
            used[u].discard(c)
            used[v].discard(c)
        del colour[best]
        todo.add(best)
        return False

    if not search():
        raise Infeasible("no proper colouring from the given lists")
    return colour


def immerse_via_common_neighbors(
    g: MultiGraph,
    log: DerivationLog | None,
    A: Sequence[int],
    B: Iterable[int],
    t: int,
) -> ImmersionCertificate:
    """Clique on the ``t`` lowest vertices of ``A``, made by splitting at vertices of ``B``.

    Every non-adjacent pair among those vertices needs ``t`` common
    neighbours in ``B``.  Each missing pair ``uv`` gets a colour ``b`` from a
    proper list edge colouring and the edges ``ub``, ``bv`` are split off at ``b``.
    """
    Bs = set(B)
    if Bs & set(A):
        raise PreconditionViolated("A and B must be disjoint")
    if len(A) < t:
        raise PreconditionViolated(f"|A| = {len(A)} < t = {t}")
    A0 = sorted(A)[:t]
    missing = [(u, v) for u, v in combinations(A0, 2) if not g.has_edge(u, v)]
    lists = {}
    for u, v in missing:
        common = g.neighbor_set(u) & g.neighbor_set(v) & Bs
        if len(common) < t:
            raise PreconditionViolated(
                f"pair ({u}, {v}) has {len(common)} < {t} common neighbours in B"
            )
        lists[(u, v)] = common
    colouring = list_edge_coloring(missing, lists)
    consumed: set[int] = set()

    def take(x: int, b: int) -> int:
        for e in g.edges_between(x, b):
            if e not in consumed:
                consumed.add(e)
                return e
        raise InvariantBreach("verydense", f"edge {x}-{b} used twice at colour {b}")

    for u, v in missing:
        b = colouring[(u, v)]
        split_off(g, log, take(u, b), take(v, b), b)
    return clique_certificate(g, A0)


def _check_multipartite(g: MultiGraph, parts: Sequence[Sequence[int]], t: int) -> list[list[int]]:
    parts = [sorted(p) for p in parts if len(p)]
    seen: set[int] = set()
    for p in parts:
        if seen & set(p):
            raise PreconditionViolated("parts overlap")
        seen |= set(p)
    total = len(seen)
    for a, b in combinations(range(len(parts)), 2):
        for u in parts[a]:
            nb = g.neighbor_set(u)
            if not nb.issuperset(parts[b]):
                raise PreconditionViolated(f"vertex {u} is not joined to all of part {b}")
    if not parts or total - max(len(p) for p in parts) < t:
        raise PreconditionViolated(f"complete multipartite subgraph has minimum degree < {t}")
    return parts


def immerse_complete_multipartite(
    g: MultiGraph,
    log: DerivationLog | None,
    parts: Sequence[Iterable[int]],
    t: int,
) -> ImmersionCertificate:
    """K_t from a complete multipartite subgraph of minimum degree at least ``t``.

    Recursion on the largest part V1 (size s): if s >= t the K_{t,t} between
    V1 and ``t`` other vertices suffices; otherwise immerse K_{t-s} in the
    other parts, pick s non-branch vertices B outside V1, build K_s on V1
    through B and join V1 to the earlier branch vertices by direct edges.
    """
    parts = _check_multipartite(g, [list(p) for p in parts], t)
    branch = _compmult(g, log, parts, t)
    return clique_certificate(g, branch)


def _compmult(g: MultiGraph, log: DerivationLog | None, parts: list[list[int]], t: int) -> list[int]:
    if t <= 0:
        return []
    parts = sorted(parts, key=lambda p: (-len(p), p[0]))
    if t == 1:
        return [min(min(p) for p in parts)]
    V1, rest = parts[0], parts[1:]
    s = len(V1)
    others = sorted(v for p in rest for v in p)
    if s >= t:
        cert = immerse_via_common_neighbors(g, log, V1, others[:t], t)
        return list(cert.branch)
    sub = _compmult(g, log, rest, t - s)
    taken = set(sub)
    B = [v for v in others if v not in taken][:s]
    if len(B) < s:
        raise InvariantBreach("compmult", "not enough free vertices outside the first part")
    cert = immerse_via_common_neighbors(g, log, V1, B, s)
    return sub + list(cert.branch)
