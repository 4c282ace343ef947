"""Cellular chain complexes of tropical moduli spaces and Culler-Vogtmann spaces.

Degree ``p`` is spanned by orientable stable graphs with ``p`` edges; an
orientation is an ordering of the edges up to even permutation.  The
boundary contracts one edge at a time:

    d(G, e_0 < ... < e_{p-1}) = sum_i (-1)^i (G/e_i, e_0 < ... ^e_i ... < e_{p-1})

In CV mode terms that contract a loop are dropped (they leave the
genus-zero span), giving the quotient complex dual to the hairy graph
subcomplex.  Betti numbers over Q equal those of the cochain complex
because ``rank(M) == rank(M.T)``.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gctop.enumerate import EnumSpec, Mode, cache_get_or_build, enumerate_graphs, max_edges
from gctop.errors import IntegrityError, InvalidArgumentError, PreconditionError
from gctop.graph import StableGraph, canonical_form, contract_edge, is_orientable, permutation_sign
from gctop.linalg.rank import EXACT, RankConfig, certified_rank
from gctop.linalg.sparse import SparseIntMatrix


@dataclass(frozen=True)
class OrientedGenerator:
    """A canonical graph plus a reference edge ordering.

    ``order[k]`` is the graph edge sitting at position ``k``.
    """

    graph: StableGraph
    order: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.order:
            object.__setattr__(self, "order", tuple(range(self.graph.num_edges)))
        if sorted(self.order) != list(range(self.graph.num_edges)):
            raise InvalidArgumentError("reference ordering must be a permutation of the edges")

    @property
    def degree(self) -> int:
        return self.graph.num_edges

    @property
    def key(self) -> bytes:
        return self.graph.to_bytes()


OrderLookup = Callable[[StableGraph], Sequence[int]]


def boundary_with_sign(
    gen: OrientedGenerator,
    e_index: int,
    mode: Mode | str,
    order_of: OrderLookup | None = None,
) -> tuple[OrientedGenerator, int] | None:
    """Contract the edge at reference position ``e_index``.

    Returns the target generator and the sign, or ``None`` when the term
    vanishes (a loop contraction in CV mode, or a non-orientable result).
    ``order_of`` supplies reference orderings of target graphs; the default
    is the canonical edge order.
    """
    mode = Mode(mode)
    if not 0 <= e_index < gen.degree:
        raise InvalidArgumentError(f"edge position {e_index} out of range for degree {gen.degree}")
    g = gen.graph
    e = gen.order[e_index]
    if mode is Mode.CV and g.is_loop(e):
        return None
    contracted = contract_edge(g, e)
    canon, iso = canonical_form(contracted)
    if not is_orientable(canon):
        return None
    target_order = tuple(order_of(canon)) if order_of is not None else tuple(range(canon.num_edges))
    target = OrientedGenerator(canon, target_order)
    position = {edge: k for k, edge in enumerate(target.order)}
    canon_edge = iso.edge_permutation(contracted, canon)
    perm = [
        position[canon_edge[old - (old > e)]]
        for k, old in enumerate(gen.order)
        if k != e_index
    ]
    sign = (-1) ** e_index * permutation_sign(perm)
    return target, sign


# -- generators and matrices --------------------------------------------------


def _graphs(g: int, n: int, p: int, mode: Mode, cache_dir) -> list[StableGraph]:
    spec = EnumSpec(g, n, p, mode, require_orientable=True)
    if cache_dir is not None:
        return cache_get_or_build(spec, cache_dir)
    return enumerate_graphs(spec)


def shuffled_order(graph: StableGraph, seed: int) -> tuple[int, ...]:
    """A reproducible pseudo-random edge ordering tied to the graph bytes."""
    order = list(range(graph.num_edges))
    random.Random(graph.to_bytes() + seed.to_bytes(8, "big", signed=True)).shuffle(order)
    return tuple(order)


def generators(
    g: int, n: int, p: int, mode: Mode | str = Mode.FULL, cache_dir=None, seed: int | None = None
) -> list[OrientedGenerator]:
    """Basis of degree ``p``; ``seed`` replaces canonical edge orders by shuffled ones."""
    mode = Mode(mode)
    if p < 0 or p > max_edges(g, n):
        return []
    graphs = _graphs(g, n, p, mode, cache_dir)
    if seed is None:
        return [OrientedGenerator(gr) for gr in graphs]
    return [OrientedGenerator(gr, shuffled_order(gr, seed)) for gr in graphs]


def _column(args: tuple) -> list[tuple[bytes, int]]:
    gen, mode, seed = args
    order_of = None if seed is None else (lambda gr: shuffled_order(gr, seed))
    out = []
    for k in range(gen.degree):
        term = boundary_with_sign(gen, k, mode, order_of)
        if term is not None:
            out.append((term[0].key, term[1]))
    return out


def _map_columns(items: list, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_column, items, chunksize=max(1, len(items) // (4 * threads))))
    return [_column(it) for it in items]


def build_boundary_matrix(
    g: int,
    n: int,
    p: int,
    mode: Mode | str = Mode.FULL,
    cache_dir=None,
    threads: int = 1,
    seed: int | None = None,
) -> SparseIntMatrix:
    """Boundary from degree ``p`` (columns) to degree ``p - 1`` (rows)."""
    mode = Mode(mode)
    if not 1 <= p <= max_edges(g, n):
        raise PreconditionError(f"boundary degree {p} outside 1..{max_edges(g, n)}")
    cols = generators(g, n, p, mode, cache_dir, seed)
    rows = generators(g, n, p - 1, mode, cache_dir, seed)
    row_index = {gen.key: i for i, gen in enumerate(rows)}
    results = _map_columns([(gen, mode, seed) for gen in cols], threads)
    triples = []
    for j, column in enumerate(results):
        for key, sign in column:
            if key not in row_index:
                raise IntegrityError("boundary term outside the enumerated basis")
            triples.append((row_index[key], j, sign))
    return SparseIntMatrix.from_triples(len(rows), len(cols), triples)


# -- Betti numbers ------------------------------------------------------------


@dataclass
class BettiReport:
    g: int
    n: int
    mode: Mode
    gens: list[int]
    ranks: list[int]  # ranks[p] = rank of the boundary C_p -> C_{p-1}; ranks[0] = 0
    betti: list[int]
    primes: list[int]
    exact: bool
    certainty: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    def check(self) -> None:
        top = len(self.gens) - 1
        for p in range(top + 1):
            nxt = self.ranks[p + 1] if p < top else 0
            if self.betti[p] != self.gens[p] - self.ranks[p] - nxt or self.betti[p] < 0:
                raise IntegrityError(f"Betti bookkeeping fails in degree {p}")

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "mode": self.mode.value,
            "gens": self.gens,
            "ranks": self.ranks,
            "betti": self.betti,
            "primes": self.primes,
            "exact": self.exact,
        }


def betti_numbers(
    g: int,
    n: int,
    mode: Mode | str = Mode.FULL,
    cache_dir=None,
    rank_config: RankConfig | None = None,
    threads: int = 1,
    seed: int | None = None,
) -> BettiReport:
    mode = Mode(mode)
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise PreconditionError(f"(g, n) = ({g}, {n}) is unstable: need 2g - 2 + n > 0")
    cfg = rank_config or RankConfig()
    start = time.perf_counter()
    top = max_edges(g, n)
    gens = [len(generators(g, n, p, mode, cache_dir)) for p in range(top + 1)]
    ranks = [0] * (top + 1)
    certainty = ["empty"] * (top + 1)
    for p in range(1, top + 1):
        if gens[p] == 0 or gens[p - 1] == 0:
            ranks[p], certainty[p] = 0, "empty"
            continue
        m = build_boundary_matrix(g, n, p, mode, cache_dir, threads, seed)
        ranks[p], certainty[p] = certified_rank(m, cfg)
    betti = [gens[p] - ranks[p] - (ranks[p + 1] if p < top else 0) for p in range(top + 1)]
    report = BettiReport(
        g,
        n,
        mode,
        gens,
        ranks,
        betti,
        list(cfg.primes),
        exact=any(c == EXACT for c in certainty),
        certainty=certainty[1:],
        wall_time=time.perf_counter() - start,
    )
    report.check()
    return report


@dataclass
class ModeComparison:
    full: BettiReport
    cv: BettiReport
    equal_per_degree: list[bool]
    expected_exception: bool  # (g, n) == (1, 1), where the two are known to differ

    @property
    def equal(self) -> bool:
        return all(self.equal_per_degree)

    def to_json_dict(self) -> dict:
        return {
            "g": self.full.g,
            "n": self.full.n,
            "full": self.full.to_json_dict(),
            "cv": self.cv.to_json_dict(),
            "equal_per_degree": self.equal_per_degree,
            "equal": self.equal,
            "expected_exception": self.expected_exception,
        }


def compare_modes(
    g: int,
    n: int,
    cache_dir=None,
    rank_config: RankConfig | None = None,
    threads: int = 1,
) -> ModeComparison:
    full = betti_numbers(g, n, Mode.FULL, cache_dir, rank_config, threads)
    cv = betti_numbers(g, n, Mode.CV, cache_dir, rank_config, threads)
    same = [a == b for a, b in zip(full.betti, cv.betti)]
    return ModeComparison(full, cv, same, expected_exception=(g, n) == (1, 1))
