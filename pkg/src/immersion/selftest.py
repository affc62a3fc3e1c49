"""Randomized invariant suites, one per building block.

Each suite returns how many cases it ran and a list of violations.  The
``full`` level runs at least a thousand cases per suite.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .certify import (
    clique_certificate,
    lift_certificate,
    unfold_edge_with_ids,
    verify_strong_immersion,
)
from .dense import list_edge_coloring
from .errors import ImmersionError, Infeasible, TargetUnreached
from .eulprep import (
    ImmersionFound,
    bounded_degree_spanning_tree,
    check_spanning_tree,
    eulerianize,
    parity_forest,
)
from .extract import run_extraction
from .generators import random_min_degree
from .matchings import (
    Cover,
    MultipartiteWitness,
    check_cover,
    check_small_cover,
    complement_adj,
    edmonds_gallai,
    is_complete_multipartite_subgraph,
    match_structure,
    small_cover_or_witness,
)
from .multigraph import DerivationLog, MultiGraph, delete_edge, delete_vertex, split_off

LEVELS = {"quick": 1, "full": 20}


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list[str] = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, msg: str) -> None:
        if len(self.violations) < 20:
            self.violations.append(msg)
        else:
            self.notes["suppressed"] = self.notes.get("suppressed", 0) + 1


def _random_graph(rng: random.Random, n: int, p: float) -> MultiGraph:
    return MultiGraph.from_edges(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def _random_multigraph(rng: random.Random, n: int, m: int) -> MultiGraph:
    g = MultiGraph(n)
    for _ in range(m):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            g.add_edge(u, v)
    return g


def random_log(rng: random.Random, root: MultiGraph, steps: int) -> tuple[MultiGraph, DerivationLog, set[int]]:
    """Random splits and deletions from ``root``; returns the graph, the log and the split vertices."""
    g = root.copy()
    log = DerivationLog.for_root(root)
    vias: set[int] = set()
    for _ in range(steps):
        r = rng.random()
        if r < 0.8:
            vs = [v for v in g.vertices() if len(g.incident(v)) - len(g.loops_at(v)) >= 2]
            if not vs:
                break
            v = rng.choice(vs)
            inc = [e for e in g.incident(v) if e not in g.loops_at(v)]
            e1, e2 = rng.sample(inc, 2)
            split_off(g, log, e1, e2, v)
            vias.add(v)
        elif r < 0.95 and g.num_edges:
            delete_edge(g, log, rng.choice(g.edge_ids()))
        elif g.num_vertices > 2:
            delete_vertex(g, log, rng.choice(g.vertices()))
    return g, log, vias


# -- suites ---------------------------------------------------------------


def suite_split_degrees(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("split-off degree conservation")
    while res.cases < cases:
        g = _random_multigraph(rng, rng.randint(3, 9), rng.randint(3, 25))
        vs = [v for v in g.vertices() if len(g.incident(v)) - len(g.loops_at(v)) >= 2]
        if not vs:
            continue
        res.cases += 1
        v = rng.choice(vs)
        inc = [e for e in g.incident(v) if e not in g.loops_at(v)]
        e1, e2 = rng.sample(inc, 2)
        before = g.degrees()
        h = g.copy()
        split_off(h, None, e1, e2, v)
        after = h.degrees()
        for x in g.vertices():
            want = before[x] - 2 if x == v else before[x]
            if after[x] != want:
                res.fail(f"degree of {x} went {before[x]} -> {after[x]} (split at {v})")
        if h.num_edges != g.num_edges - 1:
            res.fail("edge count did not drop by one")
        h.check()
    return res


def suite_replay(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("log replay determinism")
    for _ in range(cases):
        root = _random_multigraph(rng, rng.randint(3, 10), rng.randint(4, 30))
        g, log, _ = random_log(rng, root, rng.randint(1, 25))
        res.cases += 1
        r1, r2 = log.replay(root), log.replay(root)
        if not (r1 == g and r2 == g):
            res.fail("replay differs from the live graph")
        if r1.canonical_edge_list() != r2.canonical_edge_list():
            res.fail("two replays differ")
    return res


def suite_edmonds_gallai(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("Edmonds-Gallai cover")
    for _ in range(cases):
        g = _random_graph(rng, rng.randint(1, 12), rng.uniform(0.05, 0.8))
        res.cases += 1
        cover = edmonds_gallai(g, validate=False)
        for p in check_cover(g, cover):
            res.fail(p)
    return res


def suite_small_cover(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("small cover inequalities")
    covers = witnesses = 0
    while res.cases < cases:
        n = rng.randint(3, 14)
        h = _random_graph(rng, n, rng.uniform(0.3, 0.95))
        adj = h.adjacency()
        if not isinstance(match_structure(complement_adj(adj)), Cover):
            continue
        res.cases += 1
        tau = rng.randint(1, n)
        out = small_cover_or_witness(adj, tau)
        if isinstance(out, MultipartiteWitness):
            witnesses += 1
            parts = [set(p) for p in out.parts]
            total = sum(len(p) for p in parts)
            if not is_complete_multipartite_subgraph(adj, parts):
                res.fail("witness parts are not completely joined")
            if total - max(len(p) for p in parts) < tau:
                res.fail("witness minimum degree below tau")
        else:
            covers += 1
            for p in check_small_cover(adj, out, tau):
                res.fail(p)
    res.notes = {"small_covers": covers, "witnesses": witnesses}
    return res


def suite_list_coloring(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("list edge colouring")
    while res.cases < cases:
        n = rng.randint(2, 7)
        edges = [e for e in combinations(range(n), 2) if rng.random() < rng.uniform(0.4, 1.0)]
        if not edges:
            continue
        res.cases += 1
        pool = list(range(rng.randint(n, 3 * n)))
        lists = {e: rng.sample(pool, n) for e in edges}
        try:
            col = list_edge_coloring(edges, lists)
        except Infeasible:
            res.fail(f"infeasible on n={n} with lists of size {n}")
            continue
        for e in edges:
            if col[e] not in lists[e]:
                res.fail(f"edge {e} coloured outside its list")
        for e, f in combinations(edges, 2):
            if set(e) & set(f) and col[e] == col[f]:
                res.fail(f"edges {e} and {f} share colour {col[e]}")
    return res


def suite_parity_forest(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("parity forest")
    for _ in range(cases):
        n = rng.randint(1, 30)
        tree = [(rng.randrange(v), v) for v in range(1, n)]
        f = {v: rng.randint(0, 1) for v in range(n)}
        if sum(f.values()) % 2:
            f[rng.randrange(n)] ^= 1
        res.cases += 1
        chosen = parity_forest(tree, f)
        deg = {v: 0 for v in range(n)}
        tset = {tuple(sorted(e)) for e in tree}
        for u, v in chosen:
            if (u, v) not in tset:
                res.fail(f"({u}, {v}) is not a tree edge")
            deg[u] += 1
            deg[v] += 1
        for v in range(n):
            if deg[v] % 2 != f[v]:
                res.fail(f"vertex {v} parity {deg[v] % 2} != {f[v]}")
    return res


def suite_spanning_tree(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("bounded degree spanning tree")
    fallbacks = 0
    for _ in range(cases):
        n = rng.randint(6, 60)
        g = random_min_degree(n, (n + 1) // 2, seed=rng.randrange(2**31), p=rng.uniform(0.3, 0.8))
        res.cases += 1
        try:
            edges = bounded_degree_spanning_tree(g, 5, seed=rng.randrange(1000))
        except TargetUnreached as exc:
            fallbacks += 1
            res.fail(f"no degree-5 tree on a Dirac graph with n={n} (best {exc.best_degree})")
            continue
        for p in check_spanning_tree(g, edges, 5):
            res.fail(p)
    res.notes = {"fallback_events": fallbacks}
    return res


def _dense_instance(rng: random.Random, t: int, extra: int = 30) -> MultiGraph:
    need = 11 * t + 7
    n = rng.randint(need + 1, need + extra)
    return random_min_degree(n, need, seed=rng.randrange(2**31), p=rng.uniform(0.5, 0.95))


def suite_eulerianize(rng: random.Random, cases: int) -> SuiteResult:
    res = SuiteResult("eulerianize output")
    found = 0
    for _ in range(cases):
        t = 2
        d = 22
        g = _dense_instance(rng, t)
        res.cases += 1
        log = DerivationLog.for_root(g)
        out = eulerianize(g, log, d, t, seed=rng.randrange(1000))
        if isinstance(out, ImmersionFound):
            found += 1
            lifted = lift_certificate(g, log, out.certificate, out.graph)
            if not verify_strong_immersion(g, lifted):
                res.fail("preprocessing immersion does not verify")
            continue
        h = out.graph
        if not h.is_eulerian():
            res.fail("output not Eulerian")
        if h.deficiency_sum(d) >= d:
            res.fail(f"deficiency sum {h.deficiency_sum(d)} >= {d}")
        if not (log.replay(g) == h):
            res.fail("log does not replay to the output")
    res.notes = {"immersions_during_preprocessing": found}
    return res


def suite_engine(rng: random.Random, cases: int) -> SuiteResult:
    """End-to-end runs; every state and attempt asserts its invariants as it goes."""
    res = SuiteResult("engine transitions")
    counts = {"states": 0, "grows": 0, "splits": 0}
    routes: dict[str, int] = {}
    for _ in range(cases):
        t = rng.choice([2, 2, 3])
        g = _dense_instance(rng, t, extra=20 if t == 3 else 30)
        res.cases += 1
        try:
            run = run_extraction(g, t, seed=rng.randrange(1000))
        except ImmersionError as exc:
            res.fail(f"{type(exc).__name__}: {exc}")
            continue
        counts["states"] += run.states
        counts["grows"] += run.grows
        counts["splits"] += run.splits
        routes[run.route] = routes.get(run.route, 0) + 1
        if not verify_strong_immersion(g, run.certificate):
            res.fail("final certificate rejected")
    res.notes = {**counts, "routes": routes}
    return res


def suite_lift(rng: random.Random, cases: int) -> SuiteResult:
    return lift_stress(rng, cases)


def lift_stress(rng: random.Random, cases: int) -> SuiteResult:
    """Random logs over random roots: unfolded edges are disjoint and clique lifts verify."""
    res = SuiteResult("lift soundness")
    lifted_cliques = 0
    for _ in range(cases):
        n = rng.randint(4, 12)
        root = _random_graph(rng, n, rng.uniform(0.5, 1.0))
        g, log, vias = random_log(rng, root, rng.randint(1, 3 * n))
        res.cases += 1
        seen: dict[int, int] = {}
        for e, u, v in g.edges():
            walk, ids = unfold_edge_with_ids(log, e, u)
            if walk[0] != u or walk[-1] != v:
                res.fail(f"unfolded walk of {e} has wrong ends")
            for a, b, r in zip(walk, walk[1:], ids):
                if set(root.endpoints(r)) != {a, b}:
                    res.fail(f"root edge {r} does not join {a} and {b}")
            for r in ids:
                if r in seen:
                    res.fail(f"root edge {r} used by edges {seen[r]} and {e}")
                seen[r] = e
        free = [v for v in g.vertices() if v not in vias]
        rng.shuffle(free)
        branch: list[int] = []
        for v in free:
            if all(g.has_edge(v, b) for b in branch):
                branch.append(v)
        if len(branch) < 2:
            continue
        cert = clique_certificate(g, branch)
        lifted = lift_certificate(root, log, cert, g)
        lifted_cliques += 1
        verdict = verify_strong_immersion(root, lifted)
        if not verdict:
            res.fail(f"lifted certificate rejected: {verdict.describe()}")
    res.notes = {"lifted_certificates": lifted_cliques}
    return res


SUITES: dict[str, tuple[Callable[[random.Random, int], SuiteResult], int]] = {
    "split": (suite_split_degrees, 1000),
    "replay": (suite_replay, 1000),
    "edmonds_gallai": (suite_edmonds_gallai, 1000),
    "small_cover": (suite_small_cover, 1000),
    "list_coloring": (suite_list_coloring, 10000),
    "parity_forest": (suite_parity_forest, 1000),
    "spanning_tree": (suite_spanning_tree, 1000),
    "eulerianize": (suite_eulerianize, 1000),
    "engine": (suite_engine, 1000),
    "lift": (suite_lift, 1000),
}


def run_selftest(level: str = "quick", seed: int = 0, only: list[str] | None = None) -> list[SuiteResult]:
    """Run the suites; ``quick`` uses a twentieth of the ``full`` case counts."""
    scale = LEVELS[level]
    out = []
    for name, (fn, full) in SUITES.items():
        if only and name not in only:
            continue
        cases = full if scale == LEVELS["full"] else max(10, full * scale // LEVELS["full"])
        rng = random.Random(f"{seed}:{name}")
        start = time.perf_counter()
        try:
            r = fn(rng, cases)
        except ImmersionError as exc:
            r = SuiteResult(name)
            r.fail(f"{type(exc).__name__}: {exc}")
        r.seconds = time.perf_counter() - start
        out.append(r)
    return out

