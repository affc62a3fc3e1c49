"""The extraction engine: (t, d)-states, split attempts and the outer drivers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .certify import (
    ImmersionCertificate,
    host_digest,
    lift_certificate,
    verify_strong_immersion,
)
from .dense import immerse_complete_multipartite, immerse_via_common_neighbors
from .errors import (
    DegreeTooLow,
    InvariantBreach,
    NoHighDegreeVertex,
    NotSimple,
    PreconditionViolated,
)
from .eulprep import ImmersionFound, eulerianize
from .matchings import (
    Hypomatchable,
    MultipartiteWitness,
    PerfectMatching,
    complement_adj,
    match_structure,
    small_cover_or_witness,
)
from .multigraph import DerivationLog, MultiGraph, delete_edge, delete_vertex, split_off

Tracer = Callable[[dict], None]


def degree_bound(t: int) -> int:
    return 11 * t + 7


def choose_d(t: int) -> int:
    """The even member of {11t, 11t + 1}."""
    return 11 * t if (11 * t) % 2 == 0 else 11 * t + 1


@dataclass
class TDState:
    t: int
    d: int
    g: MultiGraph
    A: list[int]
    B: frozenset[int]

    def check(self, *, full: bool = True) -> None:
        """Raise ``InvariantBreach`` unless every state condition holds literally."""
        t, d, g, A, B = self.t, self.d, self.g, self.A, self.B
        if t < 1 or d < 11 * t:
            raise InvariantBreach("state", f"need t >= 1 and d >= 11t, got t={t}, d={d}")
        if not A or len(set(A)) != len(A):
            raise InvariantBreach("state", "A must be a non-empty sequence of distinct vertices")
        if set(A) & B:
            raise InvariantBreach("state", "A and B intersect")
        if any(v not in g for v in A) or any(v not in g for v in B):
            raise InvariantBreach("state", "A or B contains a vertex outside the graph")
        if not (d - len(A) <= len(B) <= d):
            raise InvariantBreach("state (i)", f"|B| = {len(B)} outside [{d - len(A)}, {d}]")
        for i, a in enumerate(A, start=1):
            miss = len(B - g.neighbor_set(a))
            if miss > len(A) + 2 * i:
                raise InvariantBreach(
                    "state (ii)", f"a_{i} = {a} misses {miss} > {len(A) + 2 * i} vertices of B"
                )
        if full:
            if not g.is_eulerian():
                raise InvariantBreach("state", "graph is not Eulerian")
            if g.deficiency_sum(d) >= d:
                raise InvariantBreach("state", "deficiency sum is not below d")


@dataclass
class Split:
    graph: MultiGraph
    log: DerivationLog
    removed: list[int]
    Q: int = 0
    R: int = 0


@dataclass
class Grow:
    state: TDState
    added: list[int]


@dataclass
class Immersion:
    graph: MultiGraph
    log: DerivationLog
    certificate: ImmersionCertificate
    route: str


StepResult = Split | Grow | Immersion


@dataclass
class AttemptContext:
    """Bookkeeping while the vertices of A are split off one by one."""

    g0: MultiGraph
    G: MultiGraph
    log: DerivationLog
    A: list[int]
    i: int = 0
    Q: set[int] = field(default_factory=set)
    R: set[int] = field(default_factory=set)

    @property
    def Aset(self) -> set[int]:
        return set(self.A)


def initial_state(g: MultiGraph, t: int, d: int) -> TDState:
    if t < 1 or d < 11 * t:
        raise PreconditionViolated("need t >= 1 and d >= 11t")
    if not g.is_simple():
        raise NotSimple("states live on simple graphs")
    if not g.is_eulerian() or g.deficiency_sum(d) >= d:
        raise PreconditionViolated("graph must be Eulerian with deficiency sum below d")
    v = next((x for x in g.vertices() if g.degree(x) >= d), None)
    if v is None:
        raise NoHighDegreeVertex("no vertex of degree at least d")
    B = frozenset(g.neighbors(v)[:d])
    st = TDState(t, d, g, [v], B)
    st.check()
    return st


def _r_vertices(G: MultiGraph, Aset: set[int], cands) -> set[int]:
    out = set()
    for u in cands:
        if u in G and u not in Aset and any(
            c == 2 for x, c in G._nbr[u].items() if x in Aset
        ):
            out.add(u)
    return out


def build_aux_graph(ctx: AttemptContext, a: int) -> tuple[dict[int, set[int]], set[int]]:
    """Adjacency of the auxiliary graph on the edges from ``a`` to V - A, plus the secondary edges.

    Two edges au, av are adjacent when uv is an edge, or when u, v are both
    in R and at least one of the two is a secondary copy (u = v included).
    """
    G, Aset, R = ctx.G, ctx.Aset, ctx.R
    verts = [e for e in G.incident(a) if G.other_end(e, a) not in Aset]
    other = {e: G.other_end(e, a) for e in verts}
    secondary: set[int] = set()
    for u in sorted(R):
        copies = G.edges_between(a, u)
        if len(copies) == 2:
            secondary.add(copies[1])
    adj: dict[int, set[int]] = {e: set() for e in verts}
    for k, e1 in enumerate(verts):
        u = other[e1]
        for e2 in verts[k + 1:]:
            v = other[e2]
            if (u != v and G.has_edge(u, v)) or (
                u in R and v in R and (e1 in secondary or e2 in secondary)
            ):
                adj[e1].add(e2)
                adj[e2].add(e1)
    return adj, secondary


def _eliminate(ctx: AttemptContext, a: int, M, e_left: int | None) -> None:
    """Split ``a`` off completely: M gives the near-matching, the rest is paired by edge id."""
    G, child, Aset = ctx.G, ctx.log, ctx.Aset
    R_prev = set(ctx.R)
    ends = []
    for e1, e2 in M:
        x, y = G.other_end(e1, a), G.other_end(e2, a)
        if x == y or G.has_edge(x, y):
            raise InvariantBreach("attempt", f"near-matching edge {x}-{y} is not a non-edge")
        ends += [x, y]
    count: dict[int, int] = {}
    for x in ends:
        count[x] = count.get(x, 0) + 1
    if any(c > 2 for c in count.values()):
        raise InvariantBreach("attempt", "near-matching has a vertex of degree > 2")
    center = {x for x, c in count.items() if c == 2}
    if not center <= R_prev:
        raise InvariantBreach("attempt", "near-matching center is not inside R")
    touched = set(ends)
    for e1, e2 in M:
        split_off(G, child, e1, e2, a)
    for e in G.loops_at(a):
        delete_edge(G, child, e)
    rest = G.incident(a)
    if len(rest) % 2:
        raise InvariantBreach("attempt", f"odd number of leftover edges at {a}")
    if e_left is not None and e_left not in rest:
        raise InvariantBreach("attempt", "leftover edge vanished")
    for e1, e2 in zip(rest[0::2], rest[1::2]):
        x, y = G.other_end(e1, a), G.other_end(e2, a)
        touched.update((x, y))
        split_off(G, child, e1, e2, a)
        if x not in Aset or y not in Aset:
            if x not in Aset and y not in Aset:
                raise InvariantBreach("attempt", "two non-A edges left over")
            if G.multiplicity(x, y) > 2:
                raise InvariantBreach("invariant 3", f"edge {x}-{y} has multiplicity > 2")
    delete_vertex(G, child, a)
    ctx.Q |= center
    ctx.R = _r_vertices(G, Aset, R_prev | touched)
    for u in ctx.R:
        doubles = [x for x, c in G._nbr[u].items() if c == 2]
        if len(doubles) != 1 or doubles[0] not in Aset:
            raise InvariantBreach("invariant 3", f"vertex {u} has {len(doubles)} double edges")
    for u in touched:
        if u in G and u not in Aset:
            if G.degree(u) != ctx.g0.degree(u):
                raise InvariantBreach("invariant 2", f"degree of {u} changed")
            if u in G._nbr[u]:
                raise InvariantBreach("invariant 3", f"loop at non-A vertex {u}")
            for x, c in G._nbr[u].items():
                if x not in Aset and c > 1:
                    raise InvariantBreach("invariant 3", f"parallel edge {u}-{x} outside A")
    if ctx.Q & ctx.R:
        raise InvariantBreach("invariant 3", "Q and R intersect")
    if len(ctx.Q) + len(ctx.R) > ctx.i:
        raise InvariantBreach("invariant 3", f"|Q| + |R| = {len(ctx.Q) + len(ctx.R)} > {ctx.i}")


def attempt_split(state: TDState, log: DerivationLog, trace: Tracer | None = None) -> StepResult:
    """Try to split off A completely; otherwise grow A or return a K_t immersion.

    Works on a copy of the state's graph and a fork of ``log``.  Split and
    Immersion results carry the fork (to be committed by the caller); Grow
    discards it, as the new state lives on the original graph.
    """
    t, d = state.t, state.d
    if len(state.A) > t - 1:
        raise PreconditionViolated("attempt_split needs |A| <= t - 1")
    ctx = AttemptContext(state.g, state.g.copy(), log.fork(), list(state.A))
    A, Aset, B, G = ctx.A, ctx.Aset, state.B, ctx.G
    p = len(A)
    for i in range(1, p + 1):
        ctx.i = i
        a = A[p - i]
        H, secondary = build_aux_graph(ctx, a)
        other = {e: G.other_end(e, a) for e in H}
        st = match_structure(complement_adj(H))
        if trace:
            trace({"kind": "eliminate", "i": i, "a": a, "structure": type(st).__name__,
                   "Q": sorted(ctx.Q), "R": sorted(ctx.R)})
        if isinstance(st, (PerfectMatching, Hypomatchable)):
            e_left = None
            if isinstance(st, PerfectMatching):
                M = st.M
            else:
                free = [e for e in sorted(H) if other[e] not in ctx.Q and other[e] not in ctx.R]
                if not free:
                    raise InvariantBreach("attempt", "no edge outside Q and R to leave over")
                e_left = free[0]
                M = st.without(e_left)
            _eliminate(ctx, a, M, e_left)
            continue

        R = set(ctx.R)
        res = small_cover_or_witness(H, t + len(R))
        if isinstance(res, MultipartiteWitness):
            parts = []
            for part in res.parts:
                vs = sorted({other[e] for e in part if e not in secondary})
                if vs:
                    parts.append(vs)
            try:
                cert = immerse_complete_multipartite(G, ctx.log, parts, t)
            except PreconditionViolated as exc:
                raise InvariantBreach("attempt", f"multipartite witness does not transfer: {exc}") from exc
            return Immersion(G, ctx.log, cert, "multipartite")
        W1 = {other[e] for e in res.W}
        T1 = {other[e] for e in res.T}
        R2 = R - W1
        if len(W1) >= t:
            Y = (G.neighbor_set(a) & B) - W1 - T1 - R2
            if len(Y) < t:
                raise InvariantBreach("attempt", f"only {len(Y)} common neighbours for the K_t,t")
            for w in W1:
                if not Y <= G.neighbor_set(w):
                    raise InvariantBreach("attempt", f"{w} is not joined to all common neighbours")
            cert = immerse_via_common_neighbors(G, ctx.log, sorted(W1), Y, t)
            return Immersion(G, ctx.log, cert, "bipartite")
        added = sorted(W1)
        new = TDState(t, d, state.g, list(state.A) + added, frozenset(B - W1))
        new.check(full=False)
        if not (len(new.A) < len(state.A) + t):
            raise InvariantBreach("grow", "A grew by t or more")
        return Grow(new, added)

    survivors = set(state.g.vertices()) - Aset
    if set(G.vertices()) != survivors:
        raise InvariantBreach("split", "vertex set is not V - A")
    for v in survivors:
        if G.degree(v) != state.g.degree(v):
            raise InvariantBreach("split", f"degree of {v} changed")
    if not G.is_simple():
        raise InvariantBreach("split", "split graph is not simple")
    return Split(G, ctx.log, list(A), len(ctx.Q), len(ctx.R))


def find_splittable_or_immersion(
    state: TDState, log: DerivationLog, trace: Tracer | None = None
) -> Split | Immersion:
    """Grow A until it splits off, or until |A| >= t gives the dense finish."""
    t = state.t
    while True:
        if len(state.A) >= t:
            G = state.g.copy()
            child = log.fork()
            cert = immerse_via_common_neighbors(G, child, state.A[:t], state.B, t)
            return Immersion(G, child, cert, "common-neighbours")
        res = attempt_split(state, log, trace)
        if isinstance(res, Grow):
            if trace:
                trace({"kind": "grow", "A": len(res.state.A), "B": len(res.state.B),
                       "V": state.g.num_vertices})
            state = res.state
            continue
        return res


@dataclass
class ExtractionRun:
    certificate: ImmersionCertificate
    t: int
    d: int | None
    splits: int = 0
    grows: int = 0
    route: str = ""
    events: list[str] = field(default_factory=list)
    states: int = 0


def _drive(
    g: MultiGraph, t: int, d: int, log: DerivationLog, run: ExtractionRun, trace: Tracer | None
) -> tuple[MultiGraph, ImmersionCertificate]:
    cur = g
    last_key = None

    def counting(rec: dict) -> None:
        if rec["kind"] == "grow":
            run.grows += 1
        if trace:
            trace(rec)

    while True:
        state = initial_state(cur, t, d)
        run.states += 1
        if trace:
            trace({"kind": "state", "A": 1, "B": len(state.B), "V": cur.num_vertices})
        key = (cur.num_vertices,)
        if last_key is not None and not key < last_key:
            raise InvariantBreach("monovariant", "vertex count did not decrease")
        last_key = key
        res = find_splittable_or_immersion(state, log, counting)
        log.commit(res.log)
        if isinstance(res, Split):
            run.splits += 1
            if trace:
                trace({"kind": "split", "A": len(res.removed), "B": len(state.B),
                       "V": res.graph.num_vertices, "Q": res.Q, "R": res.R})
            cur = res.graph
            continue
        run.route = res.route
        if trace:
            trace({"kind": "immersion", "route": res.route, "V": res.graph.num_vertices})
        return res.graph, res.certificate


def extract_from_eulerian(
    g: MultiGraph, t: int, d: int, *, trace: Tracer | None = None
) -> ImmersionCertificate:
    """K_t strong immersion certificate on an Eulerian ``g`` with deficiency sum below d."""
    if not g.is_simple():
        raise NotSimple("input must be a simple graph")
    log = DerivationLog.for_root(g)
    run = ExtractionRun(None, t, d)  # type: ignore[arg-type]
    derived, cert = _drive(g, t, d, log, run, trace)
    lifted = lift_certificate(g, log, cert, derived)
    verdict = verify_strong_immersion(g, lifted)
    if not verdict:
        raise InvariantBreach("verify", verdict.describe())
    return lifted


def run_extraction(
    g: MultiGraph,
    t: int,
    *,
    tree_fallback: str = "strict5",
    seed: int = 0,
    trace: Tracer | None = None,
) -> ExtractionRun:
    """Full pipeline on a simple graph of minimum degree at least 11t + 7."""
    if t < 1:
        raise PreconditionViolated("t must be a positive integer")
    if not g.is_simple():
        raise NotSimple("input must be a simple graph")
    need = degree_bound(t)
    low = min(g.vertices(), key=lambda v: (g.degree(v), v), default=None)
    if low is None:
        raise PreconditionViolated("graph has no vertices")
    if g.degree(low) < need:
        raise DegreeTooLow(low, g.degree(low), need)
    if t == 1:
        v = g.vertices()[0]
        cert = ImmersionCertificate(1, (v,), {}, host_digest(g))
        return ExtractionRun(cert, t, None, route="single-vertex")

    d = choose_d(t)
    log = DerivationLog.for_root(g)
    run = ExtractionRun(None, t, d)  # type: ignore[arg-type]
    prep = eulerianize(g, log, d, t, tree_fallback=tree_fallback, seed=seed)
    run.events.extend(prep.events)
    if trace:
        trace({"kind": "prep", "V": prep.graph.num_vertices, "E": prep.graph.num_edges,
               "d": d, "events": list(prep.events)})
    if isinstance(prep, ImmersionFound):
        derived, cert = prep.graph, prep.certificate
        run.route = "preprocessing"
    else:
        derived, cert = _drive(prep.graph, t, d, log, run, trace)
    lifted = lift_certificate(g, log, cert, derived)
    verdict = verify_strong_immersion(g, lifted)
    if not verdict:
        raise InvariantBreach("verify", verdict.describe())
    run.certificate = lifted
    return run


def extract(g: MultiGraph, t: int, **kwargs) -> ImmersionCertificate:
    return run_extraction(g, t, **kwargs).certificate
