import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gctop.enumerate import EnumSpec, Mode, enumerate_graphs, max_edges
from gctop.errors import InvalidEdgeError, ResourceError, StructureError
from gctop.graph import (
    FORMAT_VERSION,
    StableGraph,
    automorphism_group_order,
    automorphisms,
    canonical_bytes,
    canonical_form,
    contract_edge,
    cut_all_edges,
    is_isomorphic,
    is_orientable,
    is_semistable,
    is_stable,
    permutation_sign,
    total_genus,
    vertex_automorphisms,
    vertex_types,
)

from oracles import brute_automorphisms, brute_isomorphic

THETA = StableGraph.build([0, 0], [(0, 1)] * 3)
K4 = StableGraph.build([0] * 4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
DUMBBELL = StableGraph.build([0, 0], [(0, 0), (1, 1), (0, 1)])
LOOP_LEG = StableGraph.build([0], [(0, 0)], [0])


def relabel(graph: StableGraph, sigma, rng=None) -> StableGraph:
    """Same graph with vertices renamed by ``sigma`` and edges listed in shuffled order."""
    edges = [(sigma[a], sigma[b]) for a, b in (graph.endpoints(e) for e in range(graph.num_edges))]
    if rng is not None:
        rng.shuffle(edges)
        edges = [e if rng.random() < 0.5 else e[::-1] for e in edges]
    genus = [0] * graph.num_vertices
    for v, g in enumerate(graph.genus):
        genus[sigma[v]] = g
    return StableGraph.build(genus, edges, [sigma[v] for v in graph.legs])


def corpus():
    out = []
    for g, n in [(0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0)]:
        for p in range(max_edges(g, n) + 1):
            out.extend(enumerate_graphs(EnumSpec(g, n, p)))
    return out


CORPUS = corpus()


# -- structure ---------------------------------------------------------------


def test_total_genus_examples():
    assert total_genus(StableGraph.build([3])) == 3
    assert total_genus(THETA) == 2
    assert total_genus(K4) == 3


def test_disconnected_graph_rejected():
    with pytest.raises(StructureError):
        StableGraph.build([0, 0], [(0, 0), (1, 1)], [0, 1])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(genus=(0,), vertex_of=(0, 0), involution=(1, 1), leg_labels=()),
        dict(genus=(0,), vertex_of=(0,), involution=(0,), leg_labels=()),
        dict(genus=(0,), vertex_of=(0,), involution=(0,), leg_labels=((0, 2),)),
        dict(genus=(0,), vertex_of=(1,), involution=(0,), leg_labels=((0, 1),)),
        dict(genus=(-1,), vertex_of=(), involution=(), leg_labels=()),
    ],
)
def test_invalid_structures(kwargs):
    with pytest.raises(StructureError):
        StableGraph(**kwargs)


def test_json_and_bytes_round_trip():
    for g in CORPUS[:40]:
        assert StableGraph.from_json_dict(g.to_json_dict()) == g
        assert StableGraph.from_bytes(g.to_bytes()) == g
    assert THETA.to_bytes()[:4] == FORMAT_VERSION.to_bytes(4, "big")


def test_truncated_bytes_rejected():
    with pytest.raises(StructureError):
        StableGraph.from_bytes(K4.to_bytes()[:-1])


# -- contraction and cutting -------------------------------------------------------


def test_contract_theta_edge():
    out = contract_edge(THETA, 0)
    assert out.genus == (0,)
    assert out.num_edges == 2 and all(out.is_loop(e) for e in range(2))


def test_contract_loop_raises_genus():
    out = contract_edge(LOOP_LEG, 0)
    assert out.genus == (1,) and out.num_edges == 0 and out.num_legs == 1
    # Contr identity: 2*1 - 2 + 1 == 2*0 - 2 + 3
    assert 2 * out.genus[0] - 2 + out.valence[0] == 2 * 0 - 2 + 3


def test_contract_dumbbell_bridge():
    out = contract_edge(DUMBBELL, 2)
    assert out.genus == (0,) and out.num_edges == 2
    assert all(out.is_loop(e) for e in range(2))


def test_contract_leg_is_error():
    with pytest.raises(InvalidEdgeError):
        contract_edge(LOOP_LEG, 1)
    with pytest.raises(InvalidEdgeError):
        contract_edge(THETA, 3)


def test_contraction_properties_over_corpus():
    for g in CORPUS:
        for e in range(g.num_edges):
            out = contract_edge(g, e)
            assert total_genus(out) == total_genus(g)
            assert sorted(lab for _, lab in out.leg_labels) == sorted(lab for _, lab in g.leg_labels)
            assert is_stable(out)
            a, b = g.endpoints(e)
            kept = min(a, b)
            lhs = 2 * out.genus[kept] - 2 + out.valence[kept]
            rhs = sum(2 * g.genus[v] - 2 + g.valence[v] for v in {a, b})
            assert lhs == rhs


def test_contraction_keeps_edge_order():
    g = K4
    out = contract_edge(g, 2)
    ends_before = [g.endpoints(k) for k in range(g.num_edges) if k != 2]
    vmap = {0: 0, 1: 1, 2: 2, 3: 0}
    expected = [tuple(sorted((vmap[a], vmap[b]))) for a, b in ends_before]
    assert [tuple(sorted(out.endpoints(k))) for k in range(out.num_edges)] == expected


def test_cut_all_edges():
    pieces = cut_all_edges(THETA)
    assert [(p.genus, p.num_legs) for p in pieces] == [((0,), 3), ((0,), 3)]
    assert [(p.genus, p.num_legs) for p in cut_all_edges(LOOP_LEG)] == [((0,), 3)]
    assert [(p.genus, p.num_legs) for p in cut_all_edges(K4)] == [((0,), 3)] * 4
    for p in pieces:
        assert p.num_edges == 0 and all(p.involution[h] == h for h in range(p.num_half_edges))


def test_cut_vertex_types_are_invariant():
    rng = random.Random(5)
    for g in CORPUS[::7]:
        sigma = list(range(g.num_vertices))
        rng.shuffle(sigma)
        assert vertex_types(relabel(g, sigma, rng)) == vertex_types(g)


def test_stability_predicates():
    bivalent = StableGraph.build([0], [], [0, 0])
    assert is_semistable(bivalent) and not is_stable(bivalent)
    torus = StableGraph.build([1])
    assert is_semistable(torus) and not is_stable(torus)
    tripod = StableGraph.build([0], [], [0, 0, 0])
    assert is_stable(tripod)


# -- canonical form -------------------------------------------------------------------


def test_theta_vertex_order_irrelevant():
    swapped = StableGraph.build([0, 0], [(1, 0)] * 3)
    assert canonical_bytes(swapped) == canonical_bytes(THETA)


def test_k4_all_relabelings_agree():
    ref = canonical_bytes(K4)
    for sigma in itertools.permutations(range(4)):
        assert canonical_bytes(relabel(K4, sigma)) == ref


def test_distinct_genus_two_one_edge_graphs():
    a = StableGraph.build([1], [(0, 0)])
    b = StableGraph.build([1, 1], [(0, 1)])
    assert canonical_bytes(a) != canonical_bytes(b)


def test_canonical_isomorphism_is_valid_and_idempotent():
    for g in CORPUS:
        canon, iso = canonical_form(g)
        assert iso.is_isomorphism(g, canon)
        assert canonical_form(canon).graph == canon


def test_canonical_agrees_with_brute_force():
    rng = random.Random(11)
    sample = rng.sample([g for g in CORPUS if g.num_vertices <= 6], 60)
    variants = []
    for g in sample:
        sigma = list(range(g.num_vertices))
        rng.shuffle(sigma)
        variants.append(relabel(g, sigma, rng))
    for a in sample:
        for b in variants:
            assert brute_isomorphic(a, b) == is_isomorphic(a, b)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_canonical_relabel_invariance(data):
    g = data.draw(st.sampled_from(CORPUS))
    sigma = data.draw(st.permutations(list(range(g.num_vertices))))
    seed = data.draw(st.integers(0, 2**16))
    h = relabel(g, sigma, random.Random(seed))
    assert canonical_bytes(h) == canonical_bytes(g)


# -- automorphisms and orientation ---------------------------------------------------------


def test_automorphism_group_orders():
    assert len(automorphisms(THETA)) == 12
    assert len(automorphisms(K4)) == 24
    assert len(automorphisms(StableGraph.build([0], [], [0, 0, 0]))) == 1


def test_automorphisms_match_exhaustive_search():
    for g in CORPUS:
        if g.num_half_edges > 12:
            continue
        ours = sorted(a.half_edge_map for a in automorphisms(g))
        assert ours == sorted(brute_automorphisms(g))


def test_automorphism_group_is_closed():
    for g in (THETA, K4, DUMBBELL):
        group = automorphisms(g)
        maps = {a.half_edge_map for a in group}
        for a in group:
            assert a.is_isomorphism(g, g)
            assert a.inverse().half_edge_map in maps
            for b in group:
                assert a.compose(b).half_edge_map in maps


def test_edge_sign_is_multiplicative():
    for g in (THETA, K4, DUMBBELL):
        group = automorphisms(g)
        for a in group:
            for b in group:
                sa = permutation_sign(a.edge_permutation(g, g))
                sb = permutation_sign(b.edge_permutation(g, g))
                sab = permutation_sign(a.compose(b).edge_permutation(g, g))
                assert sab == sa * sb


def test_automorphism_order_divides_vertex_relabelings():
    from collections import Counter
    from math import factorial, prod

    for g in CORPUS:
        classes = Counter(zip(g.genus, g.valence))
        bound = prod(factorial(c) for c in classes.values())
        assert bound % len(vertex_automorphisms(g)) == 0


def test_automorphism_cap():
    with pytest.raises(ResourceError):
        automorphisms(THETA, cap=11)
    assert automorphism_group_order(THETA) == 12


def test_orientability():
    assert not is_orientable(THETA)
    assert is_orientable(K4)
    assert is_orientable(LOOP_LEG)
    assert not is_orientable(StableGraph.build([0], [(0, 0), (0, 0)]))


def test_orientability_matches_full_group_signs():
    for g in CORPUS:
        if automorphism_group_order(g) > 5000:
            continue
        odd = any(permutation_sign(a.edge_permutation(g, g)) < 0 for a in automorphisms(g))
        assert is_orientable(g) == (not odd)


def test_cv_corpus_is_genus_zero():
    for p in range(3, 7):
        for g in enumerate_graphs(EnumSpec(3, 0, p, Mode.CV)):
            assert set(g.genus) == {0}
