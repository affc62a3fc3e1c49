"""Graph and certificate files.

Graphs use a DIMACS-style edge format with 1-based vertices; certificates
are JSON.  Internally everything is 0-based, and this module is the only
place that converts.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .certify import ImmersionCertificate
from .errors import FormatError
from .multigraph import MultiGraph


def parse_graph(text: str) -> MultiGraph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise FormatError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] not in ("graph", "edge"):
                raise FormatError(f"line {lineno}: expected 'p graph <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer header") from None
            if n < 0 or m < 0:
                raise FormatError(f"line {lineno}: negative counts")
        elif parts[0] == "e":
            if n is None:
                raise FormatError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer vertex") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"line {lineno}: vertex out of range 1..{n}")
            if u == v:
                raise FormatError(f"line {lineno}: loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise FormatError(f"line {lineno}: duplicate edge {u} {v}")
            seen.add(key)
            edges.append((u - 1, v - 1))
        else:
            raise FormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise FormatError("missing header")
    if len(edges) != m:
        raise FormatError(f"header promises {m} edges, found {len(edges)}")
    return MultiGraph.from_edges(n, edges)


def emit_graph(g: MultiGraph, comments: Iterable[str] = ()) -> str:
    vs = g.vertices()
    if vs != list(range(len(vs))):
        raise FormatError("graph vertices must be 0..n-1 to be written")
    lines = [f"c {c}" for c in comments]
    pairs = g.canonical_edge_list()
    lines.append(f"p graph {len(vs)} {len(pairs)}")
    lines += [f"e {u + 1} {v + 1}" for u, v in pairs]
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> MultiGraph:
    return parse_graph(Path(path).read_text())


def write_graph(path: str | Path, g: MultiGraph, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(emit_graph(g, comments))


def cert_to_dict(cert: ImmersionCertificate) -> dict:
    return {
        "t": cert.t,
        "host_digest": cert.host_digest,
        "branch": [v + 1 for v in cert.branch],
        "paths": [
            {"pair": [i + 1, j + 1], "vertices": [v + 1 for v in cert.paths[(i, j)]]}
            for i, j in sorted(cert.paths)
        ],
    }


def cert_from_dict(data: dict) -> ImmersionCertificate:
    try:
        t = int(data["t"])
        branch = tuple(int(v) - 1 for v in data["branch"])
        paths = {}
        for rec in data["paths"]:
            i, j = (int(x) - 1 for x in rec["pair"])
            verts = tuple(int(v) - 1 for v in rec["vertices"])
            if i > j:
                i, j, verts = j, i, tuple(reversed(verts))
            if (i, j) in paths:
                raise FormatError(f"pair {i + 1},{j + 1} listed twice")
            paths[(i, j)] = verts
        digest = str(data.get("host_digest", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed certificate: {exc}") from exc
    return ImmersionCertificate(t, branch, paths, digest)


def emit_certificate(cert: ImmersionCertificate) -> str:
    return json.dumps(cert_to_dict(cert), indent=1) + "\n"


def parse_certificate(text: str) -> ImmersionCertificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"certificate is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("certificate must be a JSON object")
    return cert_from_dict(data)


def read_certificate(path: str | Path) -> ImmersionCertificate:
    return parse_certificate(Path(path).read_text())


def write_certificate(path: str | Path, cert: ImmersionCertificate) -> None:
    Path(path).write_text(emit_certificate(cert))
