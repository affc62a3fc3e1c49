"""Benchmark suites: run the extraction on generated instances and report."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .certify import verify_strong_immersion
from .extract import run_extraction
from .generators import gen


@dataclass
class Instance:
    name: str
    family: str
    params: dict
    t: int
    seed: int = 0


@dataclass
class Record:
    name: str
    t: int
    n: int
    m: int
    d: int | None
    seconds: float
    route: str
    splits: int
    grows: int
    states: int
    tree_fallback: bool
    certificate_length: int
    verified: bool
    events: list[str] = field(default_factory=list)


def default_suite() -> list[Instance]:
    out = []
    for t in (1, 2, 3):
        need = 11 * t + 7
        deg = need if need % 2 == 0 else need + 1
        out.append(Instance(f"regular-{t}", "random_regular", {"n": 200, "d": deg}, t, 7))
        out.append(Instance(f"complete-{t}", "complete", {"n": need + 1}, t))
        out.append(Instance(f"blocks-{t}", "two_blocks_thin_cut", {"block": need + 11, "degree": deg}, t, 3))
        out.append(Instance(f"multipartite-{t}", "complete_multipartite", {"parts": [need // 2 + 1] * 3}, t))
    return out


SUITES = {"default": default_suite}


def run_instance(inst: Instance) -> Record:
    g = gen(inst.family, inst.params, inst.seed)
    start = time.perf_counter()
    run = run_extraction(g, inst.t, seed=inst.seed)
    seconds = time.perf_counter() - start
    return Record(
        inst.name,
        inst.t,
        g.num_vertices,
        g.num_edges,
        run.d,
        seconds,
        run.route,
        run.splits,
        run.grows,
        run.states,
        "tree_fallback" in run.events,
        run.certificate.total_length(),
        bool(verify_strong_immersion(g, run.certificate)),
        list(run.events),
    )


def run_suite(name: str = "default", jobs: int = 1) -> dict:
    instances = SUITES[name]()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            records = list(pool.map(run_instance, instances))
    else:
        records = [run_instance(i) for i in instances]
    return {
        "suite": name,
        "instances": len(records),
        "all_verified": all(r.verified for r in records),
        "records": [asdict(r) for r in records],
    }
