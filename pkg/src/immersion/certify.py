"""Immersion certificates: verification, edge unfolding and lifting."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import DigestMismatch, LiftViolation, UnknownEdge
from .multigraph import DerivationLog, MultiGraph

Pair = tuple[int, int]


def host_digest(g: MultiGraph) -> str:
    """SHA-256 over the sorted ``"u v"`` lines (1-based, with multiplicity)."""
    text = "".join(f"{u + 1} {v + 1}\n" for u, v in g.canonical_edge_list())
    return hashlib.sha256(text.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class ImmersionCertificate:
    """Branch vertices plus one host path per pair of clique vertices.

    ``paths`` is keyed by 0-based index pairs ``(i, j)`` with ``i < j``; the
    path for ``(i, j)`` runs from ``branch[i]`` to ``branch[j]``.
    """

    t: int
    branch: tuple[int, ...]
    paths: Mapping[Pair, tuple[int, ...]]
    host_digest: str = ""

    def path(self, i: int, j: int) -> tuple[int, ...]:
        if i < j:
            return self.paths[(i, j)]
        return tuple(reversed(self.paths[(j, i)]))

    def total_length(self) -> int:
        return sum(len(p) - 1 for p in self.paths.values())

    def with_digest(self, digest: str) -> "ImmersionCertificate":
        return ImmersionCertificate(self.t, self.branch, self.paths, digest)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    clause: str | None = None
    pair: Pair | None = None
    vertex: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "accept"
        bits = [f"clause ({self.clause})"]
        if self.pair is not None:
            bits.append(f"pair {self.pair}")
        if self.vertex is not None:
            bits.append(f"vertex {self.vertex}")
        if self.detail:
            bits.append(self.detail)
        return "reject " + ", ".join(bits)


ACCEPT = Verdict(True)


def _reject(clause: str, pair=None, vertex=None, detail: str = "") -> Verdict:
    return Verdict(False, clause, pair, vertex, detail)


def verify_strong_immersion(
    host: MultiGraph, cert: ImmersionCertificate, *, strong: bool = True
) -> Verdict:
    """Check a certificate against ``host``.

    Clauses: (a) branch injective, (b) every path step is a host edge and the
    path is vertex-simple, (c) paths are edge-disjoint (usage of a vertex
    pair never exceeds its multiplicity), (d) internal vertices avoid the
    branch set (skipped when ``strong`` is false), (e) every pair has a path
    with the right endpoints.
    """
    if cert.host_digest and cert.host_digest != host_digest(host):
        raise DigestMismatch("certificate was issued for a different host graph")
    t = cert.t
    branch = tuple(cert.branch)
    if len(branch) != t:
        return _reject("a", detail=f"expected {t} branch vertices, got {len(branch)}")
    if len(set(branch)) != t:
        dup = next(v for v in branch if branch.count(v) > 1)
        return _reject("a", vertex=dup, detail="branch map is not injective")
    for v in branch:
        if v not in host:
            return _reject("a", vertex=v, detail="branch vertex not in host")

    expected = set(combinations(range(t), 2))
    for key in cert.paths:
        if key not in expected:
            return _reject("e", pair=key, detail="unexpected pair key")
    for i, j in sorted(expected):
        p = cert.paths.get((i, j))
        if p is None:
            return _reject("e", pair=(i, j), detail="missing path")
        if len(p) < 2 or p[0] != branch[i] or p[-1] != branch[j]:
            return _reject("e", pair=(i, j), detail="path endpoints do not match branch vertices")

    usage: dict[Pair, int] = {}
    owners: dict[Pair, list[Pair]] = {}
    for key in sorted(cert.paths):
        p = cert.paths[key]
        if len(set(p)) != len(p):
            return _reject("b", pair=key, detail="path is not vertex-simple")
        for x, y in zip(p, p[1:]):
            if x not in host or y not in host or not host.has_edge(x, y):
                return _reject("b", pair=(x, y), detail=f"step of path {key} is not a host edge")
            k = (x, y) if x <= y else (y, x)
            usage[k] = usage.get(k, 0) + 1
            owners.setdefault(k, []).append(key)
    for k in sorted(usage):
        if usage[k] > host.multiplicity(*k):
            return _reject("c", pair=k, detail=f"used by paths {owners[k]}")

    if strong:
        bset = set(branch)
        for key in sorted(cert.paths):
            for v in cert.paths[key][1:-1]:
                if v in bset:
                    return _reject("d", pair=key, vertex=v, detail="path passes through a branch vertex")
    return ACCEPT


def clique_certificate(g: MultiGraph, branch: Sequence[int]) -> ImmersionCertificate:
    """Certificate whose paths are single edges between pairwise adjacent branch vertices."""
    branch = tuple(branch)
    paths = {}
    for i, j in combinations(range(len(branch)), 2):
        u, v = branch[i], branch[j]
        if not g.has_edge(u, v):
            raise ValueError(f"branch vertices {u} and {v} are not adjacent")
        paths[(i, j)] = (u, v)
    return ImmersionCertificate(len(branch), branch, paths, host_digest(g))


# -- unfolding and lifting ------------------------------------------------


def unfold_edge_with_ids(log: DerivationLog, e: int, start: int | None = None) -> tuple[list[int], list[int]]:
    """Root walk of edge ``e`` plus the root edge ids along it.

    The walk starts at ``start`` (default: the first recorded endpoint).
    """
    ends = log.ends(e)
    if start is None:
        start = ends[0]
    elif start not in ends:
        raise ValueError(f"{start} is not an endpoint of edge {e}")
    walk = [start]
    ids: list[int] = []
    stack: list[tuple[int, int]] = [(e, start)]
    while stack:
        cur, s = stack.pop()
        ev = log.split_event(cur)
        if ev is None:
            p, q = log.ends(cur)
            walk.append(q if s == p else p)
            ids.append(cur)
            continue
        x, y = ev.ends
        if s == x:
            first, second = ev.e1, ev.e2
        else:
            first, second = ev.e2, ev.e1
        # the first half runs from s to via, the second from via onwards
        stack.append((second, ev.via))
        stack.append((first, s))
    return walk, ids


def unfold_edge(log: DerivationLog, e: int, start: int | None = None) -> list[int]:
    if not log.knows(e):
        raise UnknownEdge(f"edge {e} never existed in this history")
    return unfold_edge_with_ids(log, e, start)[0]


def shortcut_walk(walk: Sequence[int]) -> list[int]:
    """Remove cycles left to right until the walk is a simple path."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in walk:
        k = pos.get(v)
        if k is not None:
            for w in out[k + 1:]:
                del pos[w]
            del out[k + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def assign_parallel_copies(g: MultiGraph, cert: ImmersionCertificate) -> dict[Pair, list[int]]:
    """Greedily give every path step its own edge id in ``g``."""
    used: set[int] = set()
    out: dict[Pair, list[int]] = {}
    for key in sorted(cert.paths):
        p = cert.paths[key]
        eids = []
        for x, y in zip(p, p[1:]):
            e = next((c for c in g.edges_between(x, y) if c not in used), None)
            if e is None:
                raise ValueError(f"no free edge between {x} and {y} for path {key}")
            used.add(e)
            eids.append(e)
        out[key] = eids
    return out


def lift_certificate(
    root: MultiGraph,
    log: DerivationLog,
    derived_cert: ImmersionCertificate,
    derived: MultiGraph | None = None,
) -> ImmersionCertificate:
    """Turn a certificate on a log-derived graph into one on ``root``.

    ``derived`` is the graph the certificate was issued for; when omitted it
    is rebuilt by replaying ``log``.
    """
    if derived is None:
        derived = log.replay(root)
    steps = assign_parallel_copies(derived, derived_cert)
    bset = set(derived_cert.branch)
    paths: dict[Pair, tuple[int, ...]] = {}
    for key in sorted(derived_cert.paths):
        p = derived_cert.paths[key]
        walk = [p[0]]
        for x, e in zip(p, steps[key]):
            seg, _ = unfold_edge_with_ids(log, e, x)
            walk.extend(seg[1:])
        path = shortcut_walk(walk)
        for v in path[1:-1]:
            if v in bset:
                raise LiftViolation(key, v)
        paths[key] = tuple(path)
    return ImmersionCertificate(derived_cert.t, tuple(derived_cert.branch), paths, host_digest(root))
