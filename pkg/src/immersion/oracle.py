"""Exact (brute force) K_t immersion testing for small graphs.

Branch sets are tried by decreasing degree sum.  For each one, the pairs
are routed one at a time, always picking the pair that is currently
farthest apart, and enumerating its paths in the residual graph by
increasing length.  A partial packing is abandoned when

* some branch vertex has fewer residual edges than unrouted pairs at it, or
* the residual distances of the unrouted pairs add up to more than the
  number of residual edges.

The second bound also caps the length of every path tried.
"""

from __future__ import annotations

import multiprocessing as mp
import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

import networkx as nx

from .certify import ImmersionCertificate, host_digest, verify_strong_immersion
from .errors import BadParams, NotSimple
from .generators import random_min_degree
from .multigraph import MultiGraph

INF = 1 << 30


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 10**8
    time_cap: float = 1800.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.time_cap <= 0:
            raise BadParams("budget limits must be positive")


@dataclass(frozen=True)
class Yes:
    certificate: ImmersionCertificate
    nodes: int = 0


@dataclass(frozen=True)
class No:
    nodes: int = 0
    branch_sets: int = 0


@dataclass(frozen=True)
class Exhausted:
    nodes: int = 0
    reason: str = ""


Outcome = Yes | No | Exhausted


class _OutOfBudget(Exception):
    pass


class _Packer:
    """Edge-disjoint path packing for one fixed branch set."""

    def __init__(self, n: int, mult: list[list[int]], branch: Sequence[int], strong: bool, counter):
        self.n = n
        self.res = [row[:] for row in mult]
        self.nbrs = [[w for w in range(n) if mult[v][w]] for v in range(n)]
        self.edges = sum(mult[u][v] for u in range(n) for v in range(u + 1, n))
        self.branch = list(branch)
        self.bset = set(branch)
        self.strong = strong
        self.counter = counter
        self.failed: set = set()
        self.paths: dict[tuple[int, int], tuple[int, ...]] = {}

    def _bfs(self, s: int) -> list[int]:
        dist = [INF] * self.n
        dist[s] = 0
        frontier = [s]
        res, nbrs, bset, strong = self.res, self.nbrs, self.bset, self.strong
        while frontier:
            nxt = []
            for v in frontier:
                if strong and v != s and v in bset:
                    continue
                dv = dist[v] + 1
                row = res[v]
                for w in nbrs[v]:
                    if row[w] and dist[w] == INF:
                        dist[w] = dv
                        nxt.append(w)
            frontier = nxt
        return dist

    def _key(self, remaining: tuple) -> tuple:
        res, n = self.res, self.n
        return remaining, bytes(min(res[u][v], 255) for u in range(n) for v in range(u + 1, n))

    def solve(self, remaining: tuple[tuple[int, int], ...]) -> bool:
        self.counter.tick()
        if not remaining:
            return True
        key = self._key(remaining)
        if key in self.failed:
            return False
        branch, res = self.branch, self.res
        demand: dict[int, int] = {}
        for i, j in remaining:
            demand[i] = demand.get(i, 0) + 1
            demand[j] = demand.get(j, 0) + 1
        for i, k in demand.items():
            v = branch[i]
            if sum(res[v][w] for w in self.nbrs[v]) < k:
                self._fail(key)
                return False
        dists = {i: self._bfs(branch[i]) for i in demand}
        total, pick, far = 0, None, -1
        for i, j in remaining:
            dd = dists[i][branch[j]]
            if dd >= INF:
                self._fail(key)
                return False
            total += dd
            if dd > far:
                far, pick = dd, (i, j)
        slack = self.edges - total
        if slack < 0:
            self._fail(key)
            return False
        i, j = pick
        rest = tuple(p for p in remaining if p != pick)
        s, t = branch[i], branch[j]
        to_t = dists[j]
        for length in range(far, far + slack + 1):
            for path in self._paths(s, t, length, to_t):
                self.paths[pick] = path
                if self.solve(rest):
                    return True
                del self.paths[pick]
        self._fail(key)
        return False

    def _fail(self, key) -> None:
        if len(self.failed) < 500_000:
            self.failed.add(key)

    def _paths(self, s: int, t: int, length: int, to_t: list[int]) -> Iterator[tuple[int, ...]]:
        """Paths of exactly ``length`` edges; their edges are consumed while the caller holds them."""
        res, nbrs, bset, strong = self.res, self.nbrs, self.bset, self.strong
        path = [s]
        on = {s}

        def dfs(v: int, left: int) -> Iterator[tuple[int, ...]]:
            self.counter.tick()
            for w in nbrs[v]:
                if not res[v][w] or w in on or to_t[w] > left - 1:
                    continue
                if w == t:
                    if left != 1:
                        continue
                elif strong and w in bset:
                    continue
                res[v][w] -= 1
                res[w][v] -= 1
                self.edges -= 1
                path.append(w)
                on.add(w)
                if w == t:
                    yield tuple(path)
                else:
                    yield from dfs(w, left - 1)
                on.discard(w)
                path.pop()
                res[v][w] += 1
                res[w][v] += 1
                self.edges += 1

        yield from dfs(s, length)


class _Counter:
    def __init__(self, budget: OracleBudget):
        self.nodes = 0
        self.budget = budget
        self.deadline = time.monotonic() + budget.time_cap

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _OutOfBudget("node budget")
        if not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _OutOfBudget("time budget")


def _matrix(g: MultiGraph) -> tuple[list[int], list[list[int]]]:
    vs = g.vertices()
    index = {v: k for k, v in enumerate(vs)}
    n = len(vs)
    mult = [[0] * n for _ in range(n)]
    for _, u, v in g.edges():
        if u != v:
            mult[index[u]][index[v]] += 1
            mult[index[v]][index[u]] += 1
    return vs, mult


def candidate_branch_sets(g: MultiGraph, t: int) -> list[tuple[int, ...]]:
    """t-subsets of vertices with degree at least t-1, by decreasing degree sum."""
    cand = [v for v in g.vertices() if g.degree(v) >= t - 1]
    sets = list(combinations(cand, t))
    sets.sort(key=lambda s: (-sum(g.degree(v) for v in s), s))
    return sets


def symmetry_classes(g: MultiGraph, sets: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """One representative per automorphism orbit, keeping the given order."""
    G = nx.Graph()
    G.add_nodes_from(g.vertices())
    G.add_edges_from((u, v) for _, u, v in g.edges())
    buckets: dict[tuple, list[nx.Graph]] = {}
    reps = []
    match = nx.algorithms.isomorphism.categorical_node_match("b", False)
    for s in sets:
        ss = set(s)
        inv = (
            tuple(sorted(g.degree(v) for v in s)),
            sum(1 for _, u, v in g.edges() if u in ss and v in ss),
        )
        H = G.copy()
        nx.set_node_attributes(H, {v: v in ss for v in H}, "b")
        seen = buckets.setdefault(inv, [])
        if any(nx.is_isomorphic(H, K, node_match=match) for K in seen):
            continue
        seen.append(H)
        reps.append(s)
    return reps


def _search(g: MultiGraph, t: int, strong: bool, sets, counter: _Counter) -> tuple | None:
    vs, mult = _matrix(g)
    index = {v: k for k, v in enumerate(vs)}
    pairs = tuple(combinations(range(t), 2))
    for s in sets:
        packer = _Packer(len(vs), mult, [index[v] for v in s], strong, counter)
        if packer.solve(pairs):
            return s, {p: tuple(vs[x] for x in path) for p, path in packer.paths.items()}
    return None


def _worker(args):
    g, t, strong, sets, budget = args
    counter = _Counter(budget)
    try:
        found = _search(g, t, strong, sets, counter)
    except _OutOfBudget as exc:
        return ("exhausted", counter.nodes, str(exc))
    if found is None:
        return ("no", counter.nodes, None)
    return ("yes", counter.nodes, found)


def decide_immersion(
    g: MultiGraph,
    t: int,
    *,
    strong: bool = False,
    budget: OracleBudget | None = None,
    symmetry: bool = False,
    jobs: int = 1,
) -> Outcome:
    """Yes with a verifying certificate, No after a complete search, or Exhausted."""
    if not g.is_simple():
        raise NotSimple("the oracle takes simple graphs")
    if t < 1:
        raise BadParams("t must be positive")
    budget = budget or OracleBudget()
    sets = candidate_branch_sets(g, t)
    if symmetry and len(sets) > 1:
        sets = symmetry_classes(g, sets)
    if jobs <= 1 or len(sets) < 2:
        status, nodes, found = _worker((g, t, strong, sets, budget))
    else:
        status, nodes, found = _parallel(g, t, strong, sets, budget, jobs)
    if status == "yes":
        branch, paths = found
        cert = ImmersionCertificate(t, tuple(branch), paths, host_digest(g))
        verdict = verify_strong_immersion(g, cert, strong=strong)
        if not verdict:
            raise AssertionError(f"oracle produced a bad certificate: {verdict.describe()}")
        return Yes(cert, nodes)
    if status == "no":
        return No(nodes, len(sets))
    return Exhausted(nodes, found)


def _parallel(g, t, strong, sets, budget, jobs):
    chunks = [sets[k::jobs] for k in range(jobs)]
    total, reason = 0, None
    exhausted = False
    ctx = mp.get_context("fork")
    with ctx.Pool(jobs) as pool:
        for status, nodes, found in pool.imap_unordered(
            _worker, [(g, t, strong, c, budget) for c in chunks if c]
        ):
            total += nodes
            if status == "yes":
                pool.terminate()
                return "yes", total, found
            if status == "exhausted":
                exhausted, reason = True, found
    return ("exhausted", total, reason) if exhausted else ("no", total, None)


@dataclass
class SampleReport:
    t: int
    n_max: int
    samples: int
    yes: int = 0
    no: int = 0
    exhausted: int = 0
    findings: list[dict] = field(default_factory=list)

    @property
    def exhausted_rate(self) -> float:
        return self.exhausted / self.samples if self.samples else 0.0

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "n_max": self.n_max,
            "samples": self.samples,
            "yes": self.yes,
            "no": self.no,
            "exhausted": self.exhausted,
            "exhausted_rate": self.exhausted_rate,
            "findings": self.findings,
        }


def sample_graph(t: int, n_max: int, rng: random.Random) -> MultiGraph:
    n = rng.randint(t, max(t, n_max))
    return random_min_degree(n, t - 1, seed=rng.randrange(2**31), p=rng.uniform(0.2, 0.7))


def sampled_mindegree_property(
    t: int,
    n_max: int,
    samples: int,
    seed: int = 0,
    *,
    strong: bool = False,
    budget: OracleBudget | None = None,
) -> SampleReport:
    """Run the oracle on random graphs of minimum degree t-1; any No is recorded as a finding."""
    rng = random.Random(seed)
    report = SampleReport(t, n_max, samples)
    budget = budget or OracleBudget(max_nodes=2 * 10**6, time_cap=60.0)
    for k in range(samples):
        g = sample_graph(t, n_max, rng)
        out = decide_immersion(g, t, strong=strong, budget=budget)
        if isinstance(out, Yes):
            report.yes += 1
        elif isinstance(out, No):
            report.no += 1
            report.findings.append({"sample": k, "n": g.num_vertices, "edges": g.canonical_edge_list()})
        else:
            report.exhausted += 1
    return report
