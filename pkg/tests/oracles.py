"""Brute-force reference implementations used only by the tests.

None of these touch the canonical-form search, the enumeration layers, the
modular kernels or the Moebius inversion they are checking.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction

from gctop.graph import StableGraph


def _multiplicities(g: StableGraph) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = defaultdict(int)
    for h, j in g.edges:
        a, b = g.vertex_of[h], g.vertex_of[j]
        out[min(a, b), max(a, b)] += 1
    return out


def brute_isomorphic(a: StableGraph, b: StableGraph) -> bool:
    """Try every vertex bijection."""
    if (a.num_vertices, a.num_edges, a.num_legs) != (b.num_vertices, b.num_edges, b.num_legs):
        return False
    ma, mb = _multiplicities(a), _multiplicities(b)
    for sigma in itertools.permutations(range(b.num_vertices)):
        if any(a.genus[v] != b.genus[sigma[v]] for v in range(a.num_vertices)):
            continue
        if any(sigma[a.legs[k]] != b.legs[k] for k in range(a.num_legs)):
            continue
        image = defaultdict(int)
        for (u, v), m in ma.items():
            su, sv = sigma[u], sigma[v]
            image[min(su, sv), max(su, sv)] += m
        if image == mb:
            return True
    return False


def brute_automorphisms(g: StableGraph) -> list[tuple[int, ...]]:
    """Every half-edge bijection respecting involution, vertices, genus and legs.

    In a connected graph every vertex carries a half-edge unless the graph is
    a single bare vertex, so the half-edge map determines the vertex map.
    """
    nh = g.num_half_edges
    legs = dict(g.leg_labels)
    out: list[tuple[int, ...]] = []
    hmap = [-1] * nh
    used = [False] * nh
    vmap: dict[int, int] = {}

    def bind(x: int, y: int, added: list[int]) -> bool:
        vx, vy = g.vertex_of[x], g.vertex_of[y]
        if g.genus[vx] != g.genus[vy]:
            return False
        if vx in vmap:
            return vmap[vx] == vy
        if vy in vmap.values():
            return False
        vmap[vx] = vy
        added.append(vx)
        return True

    def extend(h: int) -> None:
        if h == nh:
            out.append(tuple(hmap))
            return
        if hmap[h] >= 0:
            extend(h + 1)
            return
        j = g.involution[h]
        for t in range(nh):
            if used[t]:
                continue
            tj = g.involution[t]
            if j == h:
                if legs.get(t) != legs[h]:
                    continue
                pairs = [(h, t)]
            else:
                if tj == t or used[tj]:
                    continue
                pairs = [(h, t), (j, tj)]
            added: list[int] = []
            if all(bind(x, y, added) for x, y in pairs):
                for x, y in pairs:
                    hmap[x], used[y] = y, True
                extend(h + 1)
                for x, y in pairs:
                    hmap[x], used[y] = -1, False
            for vx in added:
                del vmap[vx]

    extend(0)
    return out


def naive_stable_graphs(g: int, n: int, p: int) -> list[StableGraph]:
    """Every connected stable labelled graph, deduplicated by brute-force isomorphism."""
    reps: dict[tuple, list[StableGraph]] = defaultdict(list)
    for nv in range(1, p + 2):
        b1 = p - nv + 1
        if b1 > g:
            continue
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        for edges in itertools.combinations_with_replacement(pairs, p):
            if not _connected(nv, edges):
                continue
            for genus in _compositions(g - b1, nv):
                for legs in itertools.product(range(nv), repeat=n):
                    val = [0] * nv
                    for a, b in edges:
                        val[a] += 1
                        val[b] += 1
                    for v in legs:
                        val[v] += 1
                    if any(2 * genus[v] - 2 + val[v] <= 0 for v in range(nv)):
                        continue
                    cand = StableGraph.build(genus, edges, legs)
                    key = (
                        tuple(sorted(zip(genus, val))),
                        tuple(sorted(_multiplicities(cand).values())),
                    )
                    if not any(brute_isomorphic(cand, r) for r in reps[key]):
                        reps[key].append(cand)
    return [r for bucket in reps.values() for r in bucket]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _connected(nv: int, edges) -> bool:
    adj = defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == nv


def rational_rank(rows: list[list[int]]) -> int:
    """Gaussian elimination over Fraction."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    m, ncols = len(a), len(a[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(m):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def lyndon_count(weight: int) -> int:
    """Lyndon words over letters 3, 5, 7, ... (letter k has weight k) of the given total weight."""
    letters = list(range(3, weight + 1, 2))
    count = 0

    def words(rest):
        if rest == 0:
            yield ()
            return
        for x in letters:
            if x <= rest:
                for w in words(rest - x):
                    yield (x,) + w

    for w in words(weight):
        if all(w < w[i:] + w[:i] for i in range(1, len(w))):
            count += 1
    return count


def series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def witt_product(dims: dict[int, int], n: int) -> list[int]:
    """prod_{g <= n} (1 - t^g)^(-dims[g]) truncated at t^n."""
    prod = [1] + [0] * n
    for g in range(1, n + 1):
        ell = dims.get(g, 0)
        if not ell:
            continue
        factor = [0] * (n + 1)
        for k in range(n // g + 1):
            factor[g * k] = math.comb(ell + k - 1, k)
        prod = series_mul(prod, factor, n)
    return prod


def akiyama_tanigawa(m: int) -> Fraction:
    """B_m by the Akiyama-Tanigawa triangle (convention B_1 = +1/2)."""
    a = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        a[k] = Fraction(1, k + 1)
        for j in range(k, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]
