"""Tropicalization of Fenchel-Nielsen pants data and the CV / handlebody loci.

A pants curve of length ``l < eps`` survives as an edge of length
``-log(l / eps)``; a curve of length ``l >= eps`` is contracted.  Length 0
encodes a node and maps to an edge of infinite length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from gctop.errors import ConfigurationError, InvalidArgumentError, StructureError
from gctop.graph import StableGraph, contract_edge, is_stable, total_genus

# Two closed geodesics shorter than this are disjoint (collar lemma).
COLLAR_CONSTANT = math.log(3 + 2 * math.sqrt(2))


@dataclass(frozen=True)
class MetricPantsData:
    """Lengths (and ignored twists) along the curves of a pants decomposition."""

    graph: StableGraph
    lengths: tuple[float, ...]
    epsilon: float
    twists: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        if self.twists is not None:
            object.__setattr__(self, "twists", tuple(float(x) for x in self.twists))
        eps = float(self.epsilon)
        if not (eps > 0 and eps < COLLAR_CONSTANT):
            raise ConfigurationError(
                f"epsilon must lie in (0, log(3+2*sqrt(2))) = (0, {COLLAR_CONSTANT:.4f}); got {eps}"
            )
        gr = self.graph
        if any(g != 0 for g in gr.genus) or any(n != 3 for n in gr.valence):
            raise StructureError("a pants graph has only trivalent genus-0 vertices")
        if not is_stable(gr):
            raise StructureError("pants graph must be stable")
        if gr.num_edges != 3 * total_genus(gr) - 3 + gr.num_legs:
            raise StructureError("pants graph must have 3g - 3 + n edges")
        if len(self.lengths) != gr.num_edges:
            raise InvalidArgumentError(f"expected {gr.num_edges} lengths, got {len(self.lengths)}")
        if self.twists is not None and len(self.twists) != gr.num_edges:
            raise InvalidArgumentError(f"expected {gr.num_edges} twists, got {len(self.twists)}")
        for x in self.lengths:
            if math.isnan(x) or x < 0 or math.isinf(x):
                raise InvalidArgumentError(f"curve length must be finite and non-negative, got {x}")

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MetricPantsData":
        try:
            graph = StableGraph.from_json_dict(data)
            lengths = [float(x) for x in data["lengths"]]
            twists = data.get("twists")
            eps = float(data["epsilon"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed pants JSON: {exc}") from exc
        return cls(graph, tuple(lengths), eps, None if twists is None else tuple(twists))


@dataclass(frozen=True)
class TropicalCurve:
    graph: StableGraph
    lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lengths) != self.graph.num_edges:
            raise InvalidArgumentError("one length per edge required")
        if any(not (x > 0) for x in self.lengths):
            raise InvalidArgumentError("tropical edge lengths must be positive")
        if not is_stable(self.graph):
            raise StructureError("underlying graph must be stable")

    @property
    def is_nodal(self) -> bool:
        return any(math.isinf(x) for x in self.lengths)

    def to_json_dict(self) -> dict:
        out = self.graph.to_json_dict()
        out["lengths"] = ["inf" if math.isinf(x) else x for x in self.lengths]
        return out


def tropical_length(length: float, epsilon: float) -> float:
    if length == 0:
        return math.inf
    return -math.log(length / epsilon)


def tropicalize(data: MetricPantsData) -> TropicalCurve:
    graph = data.graph
    # Contract from the highest index down: contraction keeps earlier edge indices.
    for e in reversed(range(graph.num_edges)):
        if data.lengths[e] >= data.epsilon:
            graph = contract_edge(graph, e)
    survivors = [x for x in data.lengths if x < data.epsilon]
    return TropicalCurve(graph, tuple(tropical_length(x, data.epsilon) for x in survivors))


def is_in_CV(tc: TropicalCurve) -> bool:
    if tc.is_nodal:
        raise InvalidArgumentError("a curve with infinite edge lengths is not a point of CV")
    return all(g == 0 for g in tc.graph.genus)


def is_in_HM(data: MetricPantsData) -> bool:
    tc = tropicalize(data)
    return not tc.is_nodal and is_in_CV(tc)

