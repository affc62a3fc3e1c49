"""Multigraphs with stable edge ids, splitting off, and a derivation log.

Vertices and edges are dense non-negative integers.  Edge ids are never
reused inside one derivation history: a graph copy keeps the id counter, so
edges created on a copy never collide with edges already recorded in the log
the copy was forked from.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    EdgesNotAdjacentAtVia,
    GraphError,
    InvalidPairing,
    NotSimple,
    OddDegree,
    SameEdge,
    UnknownEdge,
    UnknownVertex,
)

# Full invariant check after every mutation.  O(|E|) per call, so off by default.
CHECK_INVARIANTS = os.environ.get("IMMERSION_DEBUG", "") not in ("", "0")


class MultiGraph:
    """Undirected multigraph; loops count twice towards the degree."""

    __slots__ = ("_ends", "_inc", "_nbr", "_deg", "_next_edge", "_next_vertex")

    def __init__(self, n: int = 0):
        self._ends: dict[int, tuple[int, int]] = {}
        self._inc: dict[int, set[int]] = {}
        self._nbr: dict[int, dict[int, int]] = {}
        self._deg: dict[int, int] = {}
        self._next_edge = 0
        self._next_vertex = 0
        for _ in range(n):
            self.add_vertex()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "MultiGraph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    # -- construction -----------------------------------------------------

    def add_vertex(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self._inc[v] = set()
        self._nbr[v] = {}
        self._deg[v] = 0
        return v

    def add_edge(self, u: int, v: int, *, edge_id: int | None = None) -> int:
        self._require_vertex(u)
        self._require_vertex(v)
        if edge_id is None:
            e = self._next_edge
        else:
            if edge_id in self._ends:
                raise GraphError(f"edge id {edge_id} already in use")
            e = edge_id
        self._next_edge = max(self._next_edge, e + 1)
        self._ends[e] = (u, v)
        self._inc[u].add(e)
        self._inc[v].add(e)
        nu = self._nbr[u]
        nu[v] = nu.get(v, 0) + 1
        if u != v:
            nv = self._nbr[v]
            nv[u] = nv.get(u, 0) + 1
        self._deg[u] += 1
        self._deg[v] += 1
        if CHECK_INVARIANTS:
            self.check()
        return e

    def remove_edge(self, e: int) -> tuple[int, int]:
        try:
            u, v = self._ends.pop(e)
        except KeyError:
            raise UnknownEdge(f"edge {e} does not exist") from None
        self._inc[u].discard(e)
        self._inc[v].discard(e)
        self._drop_nbr(u, v)
        if u != v:
            self._drop_nbr(v, u)
        self._deg[u] -= 1
        self._deg[v] -= 1
        if CHECK_INVARIANTS:
            self.check()
        return u, v

    def remove_vertex(self, v: int) -> list[int]:
        """Remove ``v`` and its incident edges; returns the removed edge ids."""
        self._require_vertex(v)
        removed = sorted(self._inc[v])
        for e in removed:
            self.remove_edge(e)
        del self._inc[v], self._nbr[v], self._deg[v]
        return removed

    def _drop_nbr(self, u: int, v: int) -> None:
        nu = self._nbr[u]
        c = nu[v] - 1
        if c:
            nu[v] = c
        else:
            del nu[v]

    def _require_vertex(self, v: int) -> None:
        if v not in self._deg:
            raise UnknownVertex(f"vertex {v} does not exist")

    def copy(self) -> "MultiGraph":
        h = MultiGraph.__new__(MultiGraph)
        h._ends = dict(self._ends)
        h._inc = {v: set(s) for v, s in self._inc.items()}
        h._nbr = {v: dict(s) for v, s in self._nbr.items()}
        h._deg = dict(self._deg)
        h._next_edge = self._next_edge
        h._next_vertex = self._next_vertex
        return h

    # -- queries ----------------------------------------------------------

    @property
    def next_edge_id(self) -> int:
        return self._next_edge

    def __contains__(self, v: object) -> bool:
        return v in self._deg

    def __len__(self) -> int:
        return len(self._deg)

    @property
    def num_vertices(self) -> int:
        return len(self._deg)

    @property
    def num_edges(self) -> int:
        return len(self._ends)

    def vertices(self) -> list[int]:
        return sorted(self._deg)

    def edge_ids(self) -> list[int]:
        return sorted(self._ends)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(edge_id, u, v)`` in increasing id order."""
        for e in sorted(self._ends):
            u, v = self._ends[e]
            yield e, u, v

    def has_edge_id(self, e: int) -> bool:
        return e in self._ends

    def endpoints(self, e: int) -> tuple[int, int]:
        try:
            return self._ends[e]
        except KeyError:
            raise UnknownEdge(f"edge {e} does not exist") from None

    def other_end(self, e: int, v: int) -> int:
        a, b = self.endpoints(e)
        if a == v:
            return b
        if b == v:
            return a
        raise EdgesNotAdjacentAtVia(f"edge {e} is not incident to {v}")

    def degree(self, v: int) -> int:
        try:
            return self._deg[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} does not exist") from None

    def degrees(self) -> dict[int, int]:
        return dict(self._deg)

    def incident(self, v: int) -> list[int]:
        self._require_vertex(v)
        return sorted(self._inc[v])

    def neighbors(self, v: int) -> list[int]:
        """Distinct neighbours of ``v`` other than ``v`` itself, sorted."""
        self._require_vertex(v)
        return sorted(u for u in self._nbr[v] if u != v)

    def neighbor_set(self, v: int) -> set[int]:
        s = set(self._nbr[v])
        s.discard(v)
        return s

    def multiplicity(self, u: int, v: int) -> int:
        self._require_vertex(u)
        return self._nbr[u].get(v, 0)

    def has_edge(self, u: int, v: int) -> bool:
        return self._nbr[u].get(v, 0) > 0

    def edges_between(self, u: int, v: int) -> list[int]:
        self._require_vertex(u)
        self._require_vertex(v)
        if not self._nbr[u].get(v):
            return []
        return sorted(e for e in self._inc[u] if self._other(e, u) == v)

    def _other(self, e: int, v: int) -> int:
        a, b = self._ends[e]
        return b if a == v else a

    def loops_at(self, v: int) -> list[int]:
        self._require_vertex(v)
        return sorted(e for e in self._inc[v] if self._ends[e][0] == self._ends[e][1])

    def min_degree(self) -> int:
        return min(self._deg.values()) if self._deg else 0

    def max_degree(self) -> int:
        return max(self._deg.values()) if self._deg else 0

    def is_eulerian(self) -> bool:
        """All degrees even (connectivity is not required)."""
        return all(d % 2 == 0 for d in self._deg.values())

    def is_simple(self) -> bool:
        for v, nb in self._nbr.items():
            if v in nb:
                return False
            if any(c > 1 for c in nb.values()):
                return False
        return True

    def deficiency_sum(self, d: int) -> int:
        return sum(max(0, d - k) for k in self._deg.values())

    def adjacency(self) -> dict[int, set[int]]:
        """Simple adjacency sets (loops and multiplicities dropped)."""
        return {v: self.neighbor_set(v) for v in self._deg}

    def induced_subgraph(self, X: Iterable[int]) -> "MultiGraph":
        """Copy restricted to ``X``; vertex and edge ids are kept."""
        keep = set(X)
        for v in keep:
            self._require_vertex(v)
        h = self.copy()
        for v in sorted(set(self._deg) - keep):
            h.remove_vertex(v)
        return h

    def connected_components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for s in sorted(self._deg):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self._nbr[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1

    def canonical_edge_list(self) -> list[tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in self._ends.values())

    def check(self) -> None:
        """Assert the bookkeeping invariants; raises ``GraphError``."""
        if sum(self._deg.values()) != 2 * len(self._ends):
            raise GraphError("degree sum differs from twice the edge count")
        for v in self._deg:
            inc = self._inc[v]
            deg = sum(2 if self._ends[e][0] == self._ends[e][1] else 1 for e in inc)
            if deg != self._deg[v]:
                raise GraphError(f"degree bookkeeping broken at {v}")
            count: dict[int, int] = {}
            for e in inc:
                u = self._other(e, v)
                count[u] = count.get(u, 0) + 1
            if count != self._nbr[v]:
                raise GraphError(f"neighbour bookkeeping broken at {v}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return (
            set(self._deg) == set(other._deg)
            and {e: frozenset(p) if p[0] != p[1] else p for e, p in self._ends.items()}
            == {e: frozenset(p) if p[0] != p[1] else p for e, p in other._ends.items()}
        )

    def __repr__(self) -> str:
        return f"MultiGraph(|V|={self.num_vertices}, |E|={self.num_edges})"


def complement(g: MultiGraph) -> MultiGraph:
    """Simple complement on the same vertex ids (edge ids are fresh)."""
    if not g.is_simple():
        raise NotSimple("complement is defined for simple graphs only")
    h = MultiGraph()
    vs = g.vertices()
    top = vs[-1] + 1 if vs else 0
    for _ in range(top):
        h.add_vertex()
    for v in range(top):
        if v not in g:
            h.remove_vertex(v)
    for i, u in enumerate(vs):
        nb = g._nbr[u]
        for v in vs[i + 1:]:
            if v not in nb:
                h.add_edge(u, v)
    return h


def boundary_size(g: MultiGraph, X: Iterable[int]) -> int:
    """Number of edges with exactly one end in ``X``, with multiplicity."""
    xs = set(X)
    for v in xs:
        g._require_vertex(v)
    total = 0
    for v in xs:
        for u, c in g._nbr[v].items():
            if u not in xs:
                total += c
    return total


# -- derivation log -------------------------------------------------------


@dataclass(frozen=True)
class SplitOff:
    e1: int
    e2: int
    via: int
    produced: int
    ends: tuple[int, int]


@dataclass(frozen=True)
class EdgeDeleted:
    e: int


@dataclass(frozen=True)
class VertexDeleted:
    v: int


Event = SplitOff | EdgeDeleted | VertexDeleted


class DerivationLog:
    """Append-only record of splits and deletions starting from a root graph.

    ``fork`` opens a child log that reads through to its parent; ``commit``
    appends a child's events to the parent.  Discarding a child is just
    dropping the reference.
    """

    def __init__(self, parent: "DerivationLog | None" = None):
        self.parent = parent
        self.events: list[Event] = []
        self._ends: dict[int, tuple[int, int]] = {}
        self._splits: dict[int, SplitOff] = {}
        self._retired: set[int] = set()

    @classmethod
    def for_root(cls, root: MultiGraph) -> "DerivationLog":
        log = cls()
        for e, u, v in root.edges():
            log._ends[e] = (u, v)
        return log

    def fork(self) -> "DerivationLog":
        return DerivationLog(parent=self)

    def commit(self, child: "DerivationLog") -> None:
        if child.parent is not self:
            raise ValueError("can only commit a direct child log")
        self.events.extend(child.events)
        self._ends.update(child._ends)
        self._splits.update(child._splits)
        self._retired.update(child._retired)
        child.events = []
        child._ends = {}
        child._splits = {}
        child._retired = set()

    def __len__(self) -> int:
        own = len(self.events)
        return own + (len(self.parent) if self.parent is not None else 0)

    def all_events(self) -> list[Event]:
        chain = []
        log: DerivationLog | None = self
        while log is not None:
            chain.append(log.events)
            log = log.parent
        out: list[Event] = []
        for evs in reversed(chain):
            out.extend(evs)
        return out

    def ends(self, e: int) -> tuple[int, int]:
        log: DerivationLog | None = self
        while log is not None:
            p = log._ends.get(e)
            if p is not None:
                return p
            log = log.parent
        raise UnknownEdge(f"edge {e} never existed in this history")

    def split_event(self, e: int) -> SplitOff | None:
        log: DerivationLog | None = self
        while log is not None:
            ev = log._splits.get(e)
            if ev is not None:
                return ev
            log = log.parent
        return None

    def is_retired(self, e: int) -> bool:
        log: DerivationLog | None = self
        while log is not None:
            if e in log._retired:
                return True
            log = log.parent
        return False

    def knows(self, e: int) -> bool:
        try:
            self.ends(e)
        except UnknownEdge:
            return False
        return True

    def _retire(self, e: int) -> None:
        if self.is_retired(e):
            raise GraphError(f"edge {e} consumed or deleted twice")
        self._retired.add(e)

    def record_split(self, ev: SplitOff) -> None:
        self._retire(ev.e1)
        self._retire(ev.e2)
        self._ends[ev.produced] = ev.ends
        self._splits[ev.produced] = ev
        self.events.append(ev)

    def record_edge_deleted(self, e: int) -> None:
        self._retire(e)
        self.events.append(EdgeDeleted(e))

    def record_vertex_deleted(self, v: int) -> None:
        self.events.append(VertexDeleted(v))

    def replay(self, root: MultiGraph) -> MultiGraph:
        """Re-execute every event on a fresh copy of ``root``."""
        g = root.copy()
        for ev in self.all_events():
            if isinstance(ev, SplitOff):
                _apply_split(g, ev.e1, ev.e2, ev.via, ev.produced)
            elif isinstance(ev, EdgeDeleted):
                g.remove_edge(ev.e)
            else:
                g.remove_vertex(ev.v)
        return g


# -- splitting off --------------------------------------------------------


def _apply_split(g: MultiGraph, e1: int, e2: int, via: int, produced: int | None) -> SplitOff:
    if e1 == e2:
        raise SameEdge(f"cannot split edge {e1} with itself")
    if not g.has_edge_id(e1):
        raise UnknownEdge(f"edge {e1} does not exist")
    if not g.has_edge_id(e2):
        raise UnknownEdge(f"edge {e2} does not exist")
    g._require_vertex(via)
    a1, b1 = g._ends[e1]
    a2, b2 = g._ends[e2]
    if via not in (a1, b1) or via not in (a2, b2):
        raise EdgesNotAdjacentAtVia(f"edges {e1}, {e2} are not both incident to {via}")
    x = b1 if a1 == via else a1
    y = b2 if a2 == via else a2
    g.remove_edge(e1)
    g.remove_edge(e2)
    e3 = g.add_edge(x, y, edge_id=produced)
    return SplitOff(e1, e2, via, e3, (x, y))


def split_off(g: MultiGraph, log: DerivationLog | None, e1: int, e2: int, via: int) -> int:
    """Replace ``e1 = x·via`` and ``e2 = via·y`` by a new edge ``xy``."""
    ev = _apply_split(g, e1, e2, via, None)
    if log is not None:
        log.record_split(ev)
    return ev.produced


def delete_edge(g: MultiGraph, log: DerivationLog | None, e: int) -> None:
    g.remove_edge(e)
    if log is not None:
        log.record_edge_deleted(e)


def delete_vertex(g: MultiGraph, log: DerivationLog | None, v: int) -> None:
    """Delete ``v``, logging each incident edge deletion first."""
    for e in g.incident(v):
        delete_edge(g, log, e)
    g.remove_vertex(v)
    if log is not None:
        log.record_vertex_deleted(v)


def split_off_complete(
    g: MultiGraph,
    log: DerivationLog | None,
    v: int,
    pairing: Sequence[tuple[int, int]],
) -> list[int]:
    """Split off ``v`` completely along ``pairing`` and delete it.

    ``pairing`` must pair every non-loop edge at ``v`` exactly once.  Loops
    at ``v`` are deleted.  Returns the produced edge ids in pairing order.
    """
    if g.degree(v) % 2:
        raise OddDegree(f"vertex {v} has odd degree {g.degree(v)}")
    loops = set(g.loops_at(v))
    plain = set(g.incident(v)) - loops
    used: list[int] = [e for pair in pairing for e in pair]
    if len(used) != len(set(used)) or set(used) != plain:
        raise InvalidPairing(f"pairing does not cover the non-loop edges at {v} exactly once")
    for e in sorted(loops):
        delete_edge(g, log, e)
    produced = [split_off(g, log, e1, e2, v) for e1, e2 in pairing]
    delete_vertex(g, log, v)
    return produced
