"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor

import networkx as nx
import pytest

from conftest import ACCEPTANCE_LINES
from immersion.certify import lift_certificate, verify_strong_immersion
from immersion.dense import immerse_complete_multipartite
from immersion.extract import degree_bound, run_extraction
from immersion.generators import complete, complete_multipartite, random_regular, seymour12, two_blocks_thin_cut
from immersion.multigraph import DerivationLog, MultiGraph
from immersion.oracle import Exhausted, No, OracleBudget, Yes, decide_immersion, sampled_mindegree_property
from immersion.selftest import lift_stress, run_selftest

pytestmark = pytest.mark.nodebug


def report(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


# -- 1: end-to-end extraction ---------------------------------------------


def instances_for(t):
    rng = random.Random(1000 + t)
    need = degree_bound(t)
    out = []
    for base in (need, need + 2):
        for k in range(6):
            n = rng.randrange(need + 3, 500)
            if (n * base) % 2:
                n += 1
            out.append((f"regular d={base} n={n}", "random_regular", (n, base, rng.randrange(10**6))))
    for k in range(3):
        deg = need if need % 2 == 0 else need + 1
        block = rng.randrange(deg + 2, 200)
        out.append((f"two-blocks block={block}", "two_blocks", (block, deg, rng.randrange(10**6))))
    for k in range(3):
        p = rng.randint(3, 6)
        size = -(-need // (p - 1)) + rng.randint(0, 3)
        out.append((f"multipartite {p}x{size}", "multipartite", ([size] * p,)))
    for k in range(2):
        out.append((f"complete n={need + 1 + k}", "complete", (need + 1 + k,)))
    return out


def build(kind, args):
    if kind == "random_regular":
        n, d, seed = args
        return random_regular(n, d, seed)
    if kind == "two_blocks":
        block, deg, seed = args
        return two_blocks_thin_cut(block, deg, 2, seed)
    if kind == "multipartite":
        return complete_multipartite(args[0])
    return complete(args[0])


def run_one(job):
    t, name, kind, args = job
    g = build(kind, args)
    start = time.perf_counter()
    try:
        run = run_extraction(g, t, seed=len(name))
        ok = bool(verify_strong_immersion(g, run.certificate))
        err = ""
    except Exception as exc:  # reported, not raised: the criterion counts failures
        ok, err = False, f"{type(exc).__name__}: {exc}"
    return t, name, g.num_vertices, time.perf_counter() - start, ok, err


def test_criterion_1_end_to_end():
    jobs = [(t, name, kind, args) for t in (1, 2, 3) for name, kind, args in instances_for(t)]
    with ProcessPoolExecutor(max(1, min(8, os.cpu_count() or 1))) as pool:
        results = list(pool.map(run_one, jobs))
    per_t = {t: sum(1 for r in results if r[0] == t) for t in (1, 2, 3)}
    bad = [r for r in results if not r[4]]
    slow = [r for r in results if r[3] > 120]
    big = [r for r in results if r[2] > 500]
    worst = max(r[3] for r in results)
    ok = not bad and not slow and not big and all(c >= 20 for c in per_t.values())
    report(1, ok, f"{len(results) - len(bad)}/{len(results)} verified, per t {per_t}, slowest {worst:.1f}s")
    assert ok, bad[:3] or slow[:3]


# -- 2: the K_{3,3,3,3} negative fixture ---------------------------------


def test_criterion_2_k3333_no_k10():
    g = seymour12()
    same = g.canonical_edge_list() == complete_multipartite([3, 3, 3, 3]).canonical_edge_list()
    tiers = [OracleBudget(10**8, 1800.0), OracleBudget(10**10, 6 * 3600.0)]
    start = time.perf_counter()
    for budget in tiers:
        out = decide_immersion(g, 10, symmetry=True, budget=budget)
        if not isinstance(out, Exhausted):
            break
    ok = same and isinstance(out, No)
    report(2, ok, f"oracle {type(out).__name__} after {out.nodes} nodes in "
                  f"{time.perf_counter() - start:.1f}s, generators equal: {same}")
    assert same and not isinstance(out, Yes)
    assert isinstance(out, No)


# -- 3: the K_{3,3,3,3} positive fixture ---------------------------------


def test_criterion_3_k3333_k9():
    root = seymour12()
    g = root.copy()
    log = DerivationLog.for_root(root)
    cert = immerse_complete_multipartite(g, log, [range(0, 3), range(3, 6), range(6, 9), range(9, 12)], 9)
    lifted = lift_certificate(root, log, cert, g)
    ok = lifted.t == 9 and bool(verify_strong_immersion(root, lifted))
    report(3, ok, f"K_9 certificate with {len(log)} splits, total path length {lifted.total_length()}")
    assert ok


# -- 4: sampled tightness for t = 5, 6 ------------------------------------


def test_criterion_4_sampled_tightness():
    reps = {t: sampled_mindegree_property(t, 9, 100, seed=t) for t in (5, 6)}
    ok = all(r.no == 0 and r.samples == 100 and r.exhausted_rate < 0.2 for r in reps.values())
    detail = ", ".join(f"t={t}: {r.yes} yes / {r.no} no / {r.exhausted} exhausted "
                       f"(rate {r.exhausted_rate:.0%})" for t, r in reps.items())
    report(4, ok, detail)
    assert all(r.no == 0 for r in reps.values()), [r.findings for r in reps.values()]
    assert ok


# -- 5: oracle/verifier differential on all graphs up to 6 vertices --------


def test_criterion_5_atlas_differential():
    graphs = [h for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= 6]
    calls = bad_cert = mono = exhausted = 0
    for h in graphs:
        g = MultiGraph.from_edges(h.number_of_nodes(), h.edges())
        for strong in (True, False):
            prev_yes = True
            for t in range(1, 5):
                out = decide_immersion(g, t, strong=strong)
                calls += 1
                if isinstance(out, Exhausted):
                    exhausted += 1
                    continue
                yes = isinstance(out, Yes)
                if yes and not verify_strong_immersion(g, out.certificate, strong=strong):
                    bad_cert += 1
                if yes and not prev_yes:
                    mono += 1
                prev_yes = yes
    ok = bad_cert == 0 and mono == 0 and exhausted == 0
    report(5, ok, f"{len(graphs)} graphs, {calls} oracle calls, {bad_cert} bad certificates, "
                  f"{mono} monotonicity violations, {exhausted} exhausted")
    assert ok


# -- 6: invariant suites ---------------------------------------------------


def test_criterion_6_selftest_full():
    results = run_selftest("full", seed=0)
    viol = sum(len(r.violations) for r in results)
    counts = {r.name: r.cases for r in results}
    small = [r.name for r in results if r.cases < 1000]
    ok = viol == 0 and not small and len(results) == 10
    report(6, ok, f"{len(results)} suites, {sum(counts.values())} cases, {viol} violations")
    assert ok, [(r.name, r.violations[:3]) for r in results if r.violations]


# -- 7: lift soundness -----------------------------------------------------


def test_criterion_7_lift_stress():
    res = lift_stress(random.Random(7), 1000)
    ok = res.cases == 1000 and not res.violations
    report(7, ok, f"{res.cases} random logs, {len(res.violations)} violations, notes {res.notes}")
    assert ok, res.violations[:3]
