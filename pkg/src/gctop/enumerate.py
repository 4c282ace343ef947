"""Enumeration of stable graphs by genus, leg count and edge count.

Layer ``p`` is generated from layer ``p - 1`` by expanding one vertex, the
inverse of contracting one edge: a vertex either trades one unit of genus
for a new loop, or splits in two along a new edge.  Every graph with an edge
contracts to a graph in the previous layer, so the layers are complete.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from gctop.errors import PreconditionError, ResourceError
from gctop.graph import FORMAT_VERSION, StableGraph, canonical_form, is_orientable

DEFAULT_MAX_CLASSES = 500_000


class Mode(str, enum.Enum):
    FULL = "full"
    CV = "cv"


class CacheWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EnumSpec:
    genus: int
    legs: int
    edges: int
    mode: Mode = Mode.FULL
    require_orientable: bool = False
    max_classes: int = DEFAULT_MAX_CLASSES

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        g, n, p = self.genus, self.legs, self.edges
        if g < 0 or n < 0:
            raise PreconditionError("genus and leg count must be non-negative")
        if 2 * g - 2 + n <= 0:
            raise PreconditionError(f"(g, n) = ({g}, {n}) is unstable: need 2g - 2 + n > 0")
        if not 0 <= p <= max_edges(g, n):
            raise PreconditionError(f"edge count {p} outside 0..{max_edges(g, n)}")

    def digest(self) -> str:
        key = json.dumps(
            [FORMAT_VERSION, self.genus, self.legs, self.edges, self.mode.value, self.require_orientable]
        )
        return hashlib.sha256(key.encode()).hexdigest()


def max_edges(g: int, n: int) -> int:
    return 3 * g - 3 + n


def _ends(graph: StableGraph) -> list[list[tuple]]:
    """Half-edges at each vertex as ``("e", edge, side)`` or ``("l", label)``."""
    ends: list[list[tuple]] = [[] for _ in range(graph.num_vertices)]
    for e in range(graph.num_edges):
        a, b = graph.endpoints(e)
        ends[a].append(("e", e, 0))
        ends[b].append(("e", e, 1))
    for k, v in enumerate(graph.legs):
        ends[v].append(("l", k))
    return ends


def expansions(graph: StableGraph, mode: Mode) -> Iterator[StableGraph]:
    """All stable graphs with one more edge that contract onto ``graph``."""
    genus = list(graph.genus)
    base_edges = [list(graph.endpoints(e)) for e in range(graph.num_edges)]
    base_legs = list(graph.legs)
    ends = _ends(graph)
    nv = graph.num_vertices
    for v in range(nv):
        gv = genus[v]
        if mode is Mode.FULL and gv >= 1:
            g2 = genus.copy()
            g2[v] -= 1
            yield StableGraph.build(g2, base_edges + [[v, v]], base_legs)
        here = ends[v]
        for mask in range(1 << len(here)):
            moved = [here[i] for i in range(len(here)) if mask >> i & 1]
            n_moved = len(moved)
            n_kept = len(here) - n_moved
            splits = [(0, 0)] if mode is Mode.CV else [(g1, gv - g1) for g1 in range(gv + 1)]
            for g_keep, g_new in splits:
                if 2 * g_keep - 1 + n_kept <= 0 or 2 * g_new - 1 + n_moved <= 0:
                    continue
                edges = [e.copy() for e in base_edges]
                legs = base_legs.copy()
                for end in moved:
                    if end[0] == "e":
                        edges[end[1]][end[2]] = nv
                    else:
                        legs[end[1]] = nv
                g2 = genus.copy()
                g2[v] = g_keep
                g2.append(g_new)
                yield StableGraph.build(g2, edges + [[v, nv]], legs)


def _seed(g: int, n: int, mode: Mode) -> tuple[int, StableGraph]:
    if mode is Mode.FULL:
        return 0, StableGraph.build([g], [], [0] * n)
    return g, StableGraph.build([0], [(0, 0)] * g, [0] * n)


@lru_cache(maxsize=256)
def _layer(g: int, n: int, mode: Mode, p: int, max_classes: int) -> tuple[StableGraph, ...]:
    start, seed = _seed(g, n, mode)
    if p < start:
        return ()
    if p == start:
        return (canonical_form(seed).graph,)
    found: dict[bytes, StableGraph] = {}
    for parent in _layer(g, n, mode, p - 1, max_classes):
        for child in expansions(parent, mode):
            canon = canonical_form(child).graph
            key = canon.to_bytes()
            if key not in found:
                found[key] = canon
                if len(found) > max_classes:
                    raise ResourceError(
                        f"more than {max_classes} classes at (g, n, p) = ({g}, {n}, {p})"
                    )
    return tuple(found[k] for k in sorted(found))


def enumerate_graphs(spec: EnumSpec) -> list[StableGraph]:
    """One canonical representative per isomorphism class, sorted by serialization."""
    layer = _layer(spec.genus, spec.legs, spec.mode, spec.edges, spec.max_classes)
    if spec.require_orientable:
        return [gr for gr in layer if is_orientable(gr)]
    return list(layer)


# -- disk cache ---------------------------------------------------------------


def cache_path(spec: EnumSpec, cache_dir: str | os.PathLike) -> Path:
    return Path(cache_dir) / "gctop" / f"{spec.digest()}.graphs"


def _read_cache(path: Path, spec: EnumSpec) -> list[StableGraph]:
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    if header.get("format") != FORMAT_VERSION:
        raise ValueError(f"format version {header.get('format')} != {FORMAT_VERSION}")
    if header.get("digest") != spec.digest():
        raise ValueError("enumeration digest mismatch")
    body = lines[1:]
    if len(body) != header["count"]:
        raise ValueError(f"expected {header['count']} graphs, found {len(body)}")
    if hashlib.sha256("\n".join(body).encode()).hexdigest() != header["sha256"]:
        raise ValueError("body checksum mismatch")
    return [StableGraph.from_bytes(bytes.fromhex(line)) for line in body]


def _write_cache(path: Path, spec: EnumSpec, graphs: list[StableGraph]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = [gr.to_bytes().hex() for gr in graphs]
    header = {
        "format": FORMAT_VERSION,
        "digest": spec.digest(),
        "count": len(body),
        "sha256": hashlib.sha256("\n".join(body).encode()).hexdigest(),
    }
    text = "\n".join([json.dumps(header, sort_keys=True)] + body) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_get_or_build(spec: EnumSpec, cache_dir: str | os.PathLike) -> list[StableGraph]:
    path = cache_path(spec, cache_dir)
    if path.exists():
        try:
            return _read_cache(path, spec)
        except Exception as exc:  # any defect means rebuild
            warnings.warn(f"rebuilding cache entry {path.name}: {exc}", CacheWarning, stacklevel=2)
    graphs = enumerate_graphs(spec)
    _write_cache(path, spec, graphs)
    return graphs
