"""Stable dual graphs: construction, contraction, cutting, canonical forms.

A graph is stored as flat half-edge data.  ``vertex_of[h]`` is the vertex
carrying half-edge ``h``, ``involution[h]`` its partner (``h`` itself for a
leg), and ``leg_labels`` pairs each leg half-edge with its marking.

Graphs produced by :meth:`StableGraph.build` (and therefore every canonical
graph) use a fixed layout: edge ``k`` owns half-edges ``2k`` and ``2k + 1``
and the leg labelled ``j`` is half-edge ``2 * num_edges + j - 1``.
"""

from __future__ import annotations

import itertools
import json
import math
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from gctop.errors import InvalidEdgeError, ResourceError, StructureError

FORMAT_VERSION = 1
DEFAULT_AUTOMORPHISM_CAP = 100_000

_HEADER = struct.Struct(">I")


@dataclass(frozen=True)
class StableGraph:
    genus: tuple[int, ...]
    vertex_of: tuple[int, ...]
    involution: tuple[int, ...]
    leg_labels: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        nv = len(self.genus)
        nh = len(self.vertex_of)
        if nv == 0:
            raise StructureError("a graph needs at least one vertex")
        if len(self.involution) != nh:
            raise StructureError("involution and vertex map have different lengths")
        if any(g < 0 for g in self.genus):
            raise StructureError("vertex genera must be non-negative")
        for h, v in enumerate(self.vertex_of):
            if not 0 <= v < nv:
                raise StructureError(f"half-edge {h} points at missing vertex {v}")
        for h, j in enumerate(self.involution):
            if not 0 <= j < nh or self.involution[j] != h:
                raise StructureError(f"involution is not self-inverse at half-edge {h}")
        fixed = {h for h in range(nh) if self.involution[h] == h}
        labelled = {h for h, _ in self.leg_labels}
        if labelled != fixed or len(self.leg_labels) != len(fixed):
            raise StructureError("leg labels must cover exactly the fixed points of the involution")
        labels = sorted(lab for _, lab in self.leg_labels)
        if labels != list(range(1, len(labels) + 1)):
            raise StructureError("leg labels must be 1..n")
        if not self._connected():
            raise StructureError("graph is disconnected")

    def _connected(self) -> bool:
        nv = len(self.genus)
        parent = list(range(nv))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for h, j in enumerate(self.involution):
            a, b = find(self.vertex_of[h]), find(self.vertex_of[j])
            if a != b:
                parent[a] = b
        return len({find(v) for v in range(nv)}) == 1

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        genus: Sequence[int],
        edges: Iterable[Sequence[int]] = (),
        legs: Sequence[int] | Mapping[int, int] = (),
    ) -> "StableGraph":
        """Build a graph from vertex genera, endpoint pairs and leg positions.

        ``legs`` is either a sequence whose ``k``-th entry is the vertex of the
        leg labelled ``k + 1``, or a mapping ``label -> vertex``.
        """
        edges = [tuple(e) for e in edges]
        if isinstance(legs, Mapping):
            n = len(legs)
            try:
                legs = [legs[lab] for lab in range(1, n + 1)]
            except KeyError as exc:
                raise StructureError("leg labels must be 1..n") from exc
        vertex_of: list[int] = []
        involution: list[int] = []
        for k, e in enumerate(edges):
            if len(e) != 2:
                raise StructureError(f"edge {e!r} must have two endpoints")
            vertex_of += [int(e[0]), int(e[1])]
            involution += [2 * k + 1, 2 * k]
        base = len(vertex_of)
        leg_labels = []
        for k, v in enumerate(legs):
            vertex_of.append(int(v))
            involution.append(base + k)
            leg_labels.append((base + k, k + 1))
        return cls(tuple(int(g) for g in genus), tuple(vertex_of), tuple(involution), tuple(leg_labels))

    # -- derived data -----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.genus)

    @property
    def num_half_edges(self) -> int:
        return len(self.vertex_of)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as half-edge pairs ``(h, i(h))`` with ``h < i(h)``, ordered by ``h``."""
        return tuple((h, j) for h, j in enumerate(self.involution) if h < j)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_of_half_edge(self) -> dict[int, int]:
        out = {}
        for k, (h, j) in enumerate(self.edges):
            out[h] = k
            out[j] = k
        return out

    def endpoints(self, e: int) -> tuple[int, int]:
        h, j = self.edges[e]
        return self.vertex_of[h], self.vertex_of[j]

    def is_loop(self, e: int) -> bool:
        u, v = self.endpoints(e)
        return u == v

    @cached_property
    def legs(self) -> tuple[int, ...]:
        """Vertex of each leg, indexed by ``label - 1``."""
        out = [0] * len(self.leg_labels)
        for h, lab in self.leg_labels:
            out[lab - 1] = self.vertex_of[h]
        return tuple(out)

    @property
    def num_legs(self) -> int:
        return len(self.leg_labels)

    @cached_property
    def valence(self) -> tuple[int, ...]:
        """``n(v)``: number of half-edges at each vertex."""
        out = [0] * self.num_vertices
        for v in self.vertex_of:
            out[v] += 1
        return tuple(out)

    def total_genus(self) -> int:
        return total_genus(self)

    # -- (de)serialization --------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vertices": [{"genus": g} for g in self.genus],
            "edges": [list(self.endpoints(e)) for e in range(self.num_edges)],
            "legs": [{"vertex": v, "label": k + 1} for k, v in enumerate(self.legs)],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "StableGraph":
        try:
            genus = [int(v["genus"]) for v in data["vertices"]]
            edges = [(int(a), int(b)) for a, b in data.get("edges", [])]
            legs = {int(leg["label"]): int(leg["vertex"]) for leg in data.get("legs", [])}
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed graph JSON: {exc}") from exc
        if len(legs) != len(data.get("legs", [])):
            raise StructureError("duplicate leg labels")
        return cls.build(genus, edges, legs)

    def to_bytes(self) -> bytes:
        """Versioned byte serialization (sorted adjacency for canonical graphs)."""
        parts = [_HEADER.pack(FORMAT_VERSION), struct.pack(">H", self.num_vertices)]
        parts.append(struct.pack(f">{self.num_vertices}H", *self.genus))
        parts.append(struct.pack(">H", self.num_edges))
        for e in range(self.num_edges):
            parts.append(struct.pack(">HH", *self.endpoints(e)))
        parts.append(struct.pack(">H", self.num_legs))
        parts.append(struct.pack(f">{self.num_legs}H", *self.legs))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "StableGraph":
        try:
            (version,) = _HEADER.unpack_from(data, 0)
            if version != FORMAT_VERSION:
                raise StructureError(f"unsupported graph format version {version}")
            pos = 4
            (nv,) = struct.unpack_from(">H", data, pos)
            pos += 2
            genus = struct.unpack_from(f">{nv}H", data, pos)
            pos += 2 * nv
            (ne,) = struct.unpack_from(">H", data, pos)
            pos += 2
            edges = [struct.unpack_from(">HH", data, pos + 4 * k) for k in range(ne)]
            pos += 4 * ne
            (nl,) = struct.unpack_from(">H", data, pos)
            pos += 2
            legs = struct.unpack_from(f">{nl}H", data, pos)
            pos += 2 * nl
        except struct.error as exc:
            raise StructureError(f"truncated graph serialization: {exc}") from exc
        if pos != len(data):
            raise StructureError("trailing bytes in graph serialization")
        return cls.build(genus, edges, legs)

    def __repr__(self) -> str:
        return f"StableGraph({json.dumps(self.to_json_dict(), separators=(',', ':'))})"


@dataclass(frozen=True)
class Isomorphism:
    """Half-edge and vertex bijections between two graphs."""

    half_edge_map: tuple[int, ...]
    vertex_map: tuple[int, ...]

    def compose(self, other: "Isomorphism") -> "Isomorphism":
        """``self`` after ``other``."""
        return Isomorphism(
            tuple(self.half_edge_map[h] for h in other.half_edge_map),
            tuple(self.vertex_map[v] for v in other.vertex_map),
        )

    def inverse(self) -> "Isomorphism":
        hm = [0] * len(self.half_edge_map)
        for a, b in enumerate(self.half_edge_map):
            hm[b] = a
        vm = [0] * len(self.vertex_map)
        for a, b in enumerate(self.vertex_map):
            vm[b] = a
        return Isomorphism(tuple(hm), tuple(vm))

    def edge_permutation(self, source: StableGraph, target: StableGraph) -> tuple[int, ...]:
        """Image of each source edge index as a target edge index."""
        index = target.edge_of_half_edge
        return tuple(index[self.half_edge_map[h]] for h, _ in source.edges)

    def is_isomorphism(self, source: StableGraph, target: StableGraph) -> bool:
        hm, vm = self.half_edge_map, self.vertex_map
        if sorted(hm) != list(range(target.num_half_edges)):
            return False
        if sorted(vm) != list(range(target.num_vertices)):
            return False
        for h in range(source.num_half_edges):
            if target.vertex_of[hm[h]] != vm[source.vertex_of[h]]:
                return False
            if target.involution[hm[h]] != hm[source.involution[h]]:
                return False
        if any(target.genus[vm[v]] != g for v, g in enumerate(source.genus)):
            return False
        tl = dict(target.leg_labels)
        return all(tl.get(hm[h]) == lab for h, lab in source.leg_labels)


def permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- elementary operations ----------------------------------------------------


def total_genus(graph: StableGraph) -> int:
    return sum(graph.genus) + graph.num_edges - graph.num_vertices + 1


def is_stable(graph: StableGraph) -> bool:
    return all(2 * g - 2 + n > 0 for g, n in zip(graph.genus, graph.valence))


def is_semistable(graph: StableGraph) -> bool:
    return all(2 * g - 2 + n >= 0 for g, n in zip(graph.genus, graph.valence))


def contract_edge(graph: StableGraph, e: int) -> StableGraph:
    """Contract edge ``e``; a loop is deleted and raises its vertex genus by one.

    Surviving edges keep their relative order, so edge ``k`` of the input
    becomes edge ``k - (k > e)`` of the output.
    """
    if not 0 <= e < graph.num_edges:
        raise InvalidEdgeError(f"{e} is not an edge index (graph has {graph.num_edges} edges)")
    h, j = graph.edges[e]
    u, v = graph.vertex_of[h], graph.vertex_of[j]
    genus = list(graph.genus)
    if u == v:
        genus[u] += 1
        vmap = list(range(graph.num_vertices))
    else:
        keep, drop = min(u, v), max(u, v)
        genus[keep] = graph.genus[u] + graph.genus[v]
        del genus[drop]
        vmap = [keep if w == drop else (w if w < drop else w - 1) for w in range(graph.num_vertices)]
    hmap = {}
    for x in range(graph.num_half_edges):
        if x != h and x != j:
            hmap[x] = len(hmap)
    vertex_of = tuple(vmap[graph.vertex_of[x]] for x in hmap)
    involution = tuple(hmap[graph.involution[x]] for x in hmap)
    leg_labels = tuple((hmap[x], lab) for x, lab in graph.leg_labels)
    return StableGraph(tuple(genus), vertex_of, involution, leg_labels)


def cut_all_edges(graph: StableGraph) -> list[StableGraph]:
    """One single-vertex graph per vertex; every half-edge becomes a leg.

    Legs of each piece are labelled ``1..n(v)`` in half-edge order.
    """
    out = []
    for v, n in enumerate(graph.valence):
        out.append(
            StableGraph((graph.genus[v],), (0,) * n, tuple(range(n)), tuple((k, k + 1) for k in range(n)))
        )
    return out


def vertex_types(graph: StableGraph) -> list[tuple[int, int]]:
    """Sorted ``(genus, valence)`` multiset of the pieces of :func:`cut_all_edges`."""
    return sorted((g.genus[0], g.num_half_edges) for g in cut_all_edges(graph))


# -- canonical labelling ------------------------------------------------------


class _Search:
    """Individualization-refinement search over vertex orderings.

    Every leaf is a vertex ordering; the canonical ordering is the one with
    the lexicographically smallest encoding.  Leaves reached from an
    isomorphic graph are the images of these leaves, so the minimum is an
    isomorphism invariant.
    """

    def __init__(self, graph: StableGraph):
        nv = graph.num_vertices
        self.nv = nv
        loops = [0] * nv
        mult: list[dict[int, int]] = [dict() for _ in range(nv)]
        for e in range(graph.num_edges):
            a, b = graph.endpoints(e)
            if a == b:
                loops[a] += 1
            else:
                mult[a][b] = mult[a].get(b, 0) + 1
                mult[b][a] = mult[b].get(a, 0) + 1
        legs: list[list[int]] = [[] for _ in range(nv)]
        for k, v in enumerate(graph.legs):
            legs[v].append(k + 1)
        self.vinv = [(graph.genus[v], loops[v], graph.valence[v], tuple(legs[v])) for v in range(nv)]
        self.mult = mult
        self.nbrs = [sorted(m.items()) for m in mult]
        self.best: tuple | None = None
        self.best_orders: list[tuple[int, ...]] = []

    def _rank(self, keys: list) -> list[int]:
        distinct = sorted(set(keys))
        index = {k: i for i, k in enumerate(distinct)}
        return [index[k] for k in keys]

    def _refine(self, colors: list[int]) -> list[int]:
        ncls = len(set(colors))
        while True:
            sigs = [
                (colors[v], tuple(sorted((colors[w], m) for w, m in self.nbrs[v])))
                for v in range(self.nv)
            ]
            colors = self._rank(sigs)
            k = len(set(colors))
            if k == ncls:
                return colors
            ncls = k

    def _encode(self, order: tuple[int, ...]) -> tuple:
        mult = self.mult
        adj = tuple(
            mult[order[i]].get(order[j], 0) for i in range(self.nv) for j in range(i + 1, self.nv)
        )
        return (tuple(self.vinv[v] for v in order), adj)

    def run(self, collect_all: bool) -> None:
        colors = self._refine(self._rank(self.vinv))
        self._collect_all = collect_all
        self._descend(colors)

    def _descend(self, colors: list[int]) -> None:
        nv = self.nv
        counts = [0] * nv
        for c in colors:
            counts[c] += 1
        target = next((c for c in range(nv) if counts[c] > 1), None)
        if target is None:
            order = [0] * nv
            for v, c in enumerate(colors):
                order[c] = v
            order = tuple(order)
            code = self._encode(order)
            if self.best is None or code < self.best:
                self.best = code
                self.best_orders = [order]
            elif code == self.best and self._collect_all:
                self.best_orders.append(order)
            return
        for v in range(nv):
            if colors[v] != target:
                continue
            split = self._rank([(c, 0 if w == v else 1) for w, c in enumerate(colors)])
            self._descend(self._refine(split))


@dataclass(frozen=True)
class CanonicalForm:
    graph: StableGraph
    isomorphism: Isomorphism  # input graph -> canonical graph

    def __iter__(self) -> Iterator:
        return iter((self.graph, self.isomorphism))


def _relabel(graph: StableGraph, order: Sequence[int]) -> CanonicalForm:
    pos = [0] * graph.num_vertices
    for i, v in enumerate(order):
        pos[v] = i
    keyed = []
    for k in range(graph.num_edges):
        a, b = graph.endpoints(k)
        pa, pb = pos[a], pos[b]
        keyed.append(((min(pa, pb), max(pa, pb)), k))
    keyed.sort()
    p = len(keyed)
    hmap = [0] * graph.num_half_edges
    for slot, (_, k) in enumerate(keyed):
        h, j = graph.edges[k]
        if pos[graph.vertex_of[h]] <= pos[graph.vertex_of[j]]:
            hmap[h], hmap[j] = 2 * slot, 2 * slot + 1
        else:
            hmap[h], hmap[j] = 2 * slot + 1, 2 * slot
    for h, lab in graph.leg_labels:
        hmap[h] = 2 * p + lab - 1
    canon = StableGraph.build(
        [graph.genus[v] for v in order],
        [pair for pair, _ in keyed],
        [pos[v] for v in graph.legs],
    )
    return CanonicalForm(canon, Isomorphism(tuple(hmap), tuple(pos)))


@lru_cache(maxsize=1 << 16)
def canonical_form(graph: StableGraph) -> CanonicalForm:
    """Canonical representative and an isomorphism from ``graph`` onto it.

    Two graphs are isomorphic iff their canonical graphs serialize to the
    same bytes.
    """
    search = _Search(graph)
    search.run(collect_all=False)
    return _relabel(graph, search.best_orders[0])


def canonical_bytes(graph: StableGraph) -> bytes:
    return canonical_form(graph).graph.to_bytes()


def is_isomorphic(a: StableGraph, b: StableGraph) -> bool:
    return canonical_bytes(a) == canonical_bytes(b)


@lru_cache(maxsize=1 << 14)
def vertex_automorphisms(graph: StableGraph) -> tuple[tuple[int, ...], ...]:
    """Vertex permutations that preserve genus, legs and edge multiplicities."""
    search = _Search(graph)
    search.run(collect_all=True)
    first = search.best_orders[0]
    out = []
    for order in search.best_orders:
        sigma = [0] * graph.num_vertices
        for a, b in zip(first, order):
            sigma[a] = b
        out.append(tuple(sigma))
    return tuple(sorted(out))


def _bundles(graph: StableGraph) -> dict[tuple[int, int], list[int]]:
    """Edges grouped by unordered endpoint pair (loops under ``(v, v)``)."""
    out: dict[tuple[int, int], list[int]] = {}
    for e in range(graph.num_edges):
        a, b = graph.endpoints(e)
        out.setdefault((min(a, b), max(a, b)), []).append(e)
    return out


def automorphism_group_order(graph: StableGraph) -> int:
    local = 1
    for (a, b), es in _bundles(graph).items():
        local *= math.factorial(len(es)) * (2 ** len(es) if a == b else 1)
    return len(vertex_automorphisms(graph)) * local


def automorphisms(graph: StableGraph, cap: int = DEFAULT_AUTOMORPHISM_CAP) -> list[Isomorphism]:
    """All half-edge automorphisms fixing every leg."""
    order = automorphism_group_order(graph)
    if order > cap:
        raise ResourceError(f"automorphism group has order {order} > cap {cap}")
    bundles = _bundles(graph)
    legs = dict(graph.leg_labels)
    out = []
    for sigma in vertex_automorphisms(graph):
        choices = []  # per bundle: list of partial half-edge maps
        for (a, b), es in bundles.items():
            sa, sb = sigma[a], sigma[b]
            target = bundles[(min(sa, sb), max(sa, sb))]
            options = []
            for perm in itertools.permutations(target):
                flips = itertools.product((False, True), repeat=len(es)) if a == b else [None]
                for flip in flips:
                    part = {}
                    for idx, (e, f) in enumerate(zip(es, perm)):
                        h, j = graph.edges[e]
                        fh, fj = graph.edges[f]
                        if a == b:
                            if flip[idx]:
                                fh, fj = fj, fh
                        elif graph.vertex_of[fh] != sigma[graph.vertex_of[h]]:
                            fh, fj = fj, fh
                        part[h], part[j] = fh, fj
                    options.append(part)
            choices.append(options)
        for combo in itertools.product(*choices):
            hmap = {h: h for h in legs}
            for part in combo:
                hmap.update(part)
            out.append(Isomorphism(tuple(hmap[h] for h in range(graph.num_half_edges)), sigma))
    return out


def is_orientable(graph: StableGraph) -> bool:
    """True iff no automorphism permutes the edges oddly."""
    bundles = _bundles(graph)
    if any(len(es) > 1 for es in bundles.values()):
        return False
    slot = {pair: es[0] for pair, es in bundles.items()}
    for sigma in vertex_automorphisms(graph):
        perm = []
        for e in range(graph.num_edges):
            a, b = graph.endpoints(e)
            sa, sb = sigma[a], sigma[b]
            perm.append(slot[(min(sa, sb), max(sa, sb))])
        if permutation_sign(perm) < 0:
            return False
    return True
