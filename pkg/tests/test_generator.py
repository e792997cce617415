import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_mis_size
from petrimine.generator import (
    GeneratorParams,
    GroundTruth,
    PlantSpec,
    basic_net,
    generate,
    generate_until_arcs,
    insert_with_overlap_schema,
    plant,
    planting_net,
)
from petrimine.miner import MiningConfig, mine
from petrimine.mis import max_independent_set
from petrimine.netgraph import to_e_netgraph
from petrimine.petri import NetError, OverlapKind, PetriNet, is_complete_subnet, serialize_cenet, validate_clear, validate_pure


def test_basic_net_fixed_ranges():
    p = GeneratorParams(cond_in_range=(1, 1), cond_out_range=(1, 1))
    rng = random.Random(0)
    for _ in range(20):
        net = basic_net(rng, p)
        assert (len(net.events), len(net.conditions), len(net.arcs)) == (1, 2, 2)


def test_basic_net_many_draws_valid():
    p = GeneratorParams(cond_alphabet_size=4, event_alphabet_size=3)
    rng = random.Random(1)
    for _ in range(1000):
        net = basic_net(rng, p)
        assert validate_pure(net) == [] and validate_clear(net) == []


def test_pigeonhole_rejected():
    with pytest.raises(ValueError):
        basic_net(random.Random(0), GeneratorParams(cond_in_range=(3, 3), cond_alphabet_size=2))
    with pytest.raises(ValueError):
        GeneratorParams(U=0).validate()


def test_generate_one_connection():
    p = GeneratorParams(U=1, cond_alphabet_size=1, cond_in_range=(1, 1), cond_out_range=(0, 0), seed=3)
    net = generate(p)
    assert len(net.events) == 2 and len(net.conditions) == 1


def test_generate_deterministic():
    p = GeneratorParams(U=200, seed=11)
    assert serialize_cenet(generate(p)) == serialize_cenet(generate(p))
    assert serialize_cenet(generate(p)) != serialize_cenet(generate(p.replace(seed=12)))


@given(st.integers(0, 10**6), st.sampled_from([OverlapKind.CTYPE, OverlapKind.ETYPE]), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_generate_valid(seed, x, H):
    net = generate(GeneratorParams(x=x, U=60, H=H, event_alphabet_size=3, cond_alphabet_size=4, seed=seed))
    assert validate_pure(net) == [] and validate_clear(net) == []
    assert len(net.events) <= 61


def test_generate_until_arcs():
    net = generate_until_arcs(GeneratorParams(seed=2), 500)
    assert 500 <= len(net.arcs) < 520


def test_planting_net_connected():
    rng = random.Random(4)
    p = GeneratorParams(event_alphabet_size=3, cond_alphabet_size=3)
    for n in range(1, 5):
        s = planting_net(rng, p, n)
        assert len(s.events) == n
        assert validate_clear(s) == []
        g = nx.Graph(list(s.arcs))
        g.add_nodes_from(s.nodes)
        assert nx.is_connected(g)


def _spec(rng, params, k=2, min_sup=3):
    nets = [planting_net(rng, params, rng.randint(1, 3)) for _ in range(k)]
    return PlantSpec(nets, g=3, H=2, min_sup=min_sup, copy_bound=min_sup + 2)


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_plant_ground_truth(seed):
    rng = random.Random(seed)
    params = GeneratorParams(U=80, event_alphabet_size=4, cond_alphabet_size=6, seed=seed)
    spec = _spec(rng, params)
    net, truth = plant(spec, params, rng)
    assert validate_pure(net) == [] and validate_clear(net) == []
    ng = to_e_netgraph(net)
    for p, (c, e) in zip(truth.patterns, spec.copies):
        assert spec.min_sup < c <= spec.copy_bound and spec.min_sup < e <= spec.copy_bound
        assert len(p.occurrences) == c + e >= 2 * spec.min_sup
        assert p.disjoint_intact >= spec.min_sup
        for o in p.occurrences:
            if o.kind == "c":
                assert o.intact
            if o.intact:
                assert is_complete_subnet(net.complete_subnet(o.events), net)
        res = mine(ng, MiningConfig(spec.min_sup, mis_mode="exact", extension="complete"))
        assert res.supports().get(p.code, 0) >= spec.min_sup


def test_plant_deterministic_and_truth_round_trip():
    params = GeneratorParams(U=50, event_alphabet_size=4, cond_alphabet_size=6, seed=5)
    outs = []
    for _ in range(2):
        rng = random.Random(9)
        net, truth = plant(_spec(rng, params), params, rng)
        outs.append((serialize_cenet(net), truth.to_json()))
    assert outs[0] == outs[1]
    again = GroundTruth.from_json(outs[0][1])
    assert again.to_json() == outs[0][1]


def test_plant_nothing():
    params = GeneratorParams(U=20, seed=1)
    net, truth = plant(PlantSpec([], min_sup=2, copy_bound=3), params, random.Random(0))
    assert serialize_cenet(net) == serialize_cenet(generate(params))
    assert truth.patterns == []


def test_plant_spec_validation():
    s = planting_net(random.Random(0), GeneratorParams(cond_alphabet_size=3), 3)
    with pytest.raises(ValueError):
        PlantSpec([s], g=2).validate()
    with pytest.raises(ValueError):
        PlantSpec([s], min_sup=3, copy_bound=3).validate()


def schema_small(slots=10):
    conds = {1: "IN"} | {10 + k: f"S{k}" for k in range(slots)}
    arcs = {(1, 0)} | {(0, 10 + k) for k in range(slots)}
    return PetriNet(conds, {0: "SMALL"}, arcs)


def _schema_graph(net, copies):
    """Which copies share a condition, read straight off the net."""
    m = len(copies)
    owner = {}
    g = nx.Graph()
    g.add_nodes_from(range(m))
    for i, evs in enumerate(copies):
        for e in evs:
            for c in net.neighbors(e):
                owner.setdefault(c, set()).add(i)
    for who in owner.values():
        who = sorted(who)
        g.add_edges_from((a, b) for k, a in enumerate(who) for b in who[k + 1:])
    return g


def test_schema_single_edge():
    big = generate(GeneratorParams(U=30, seed=0))
    net, og, copies = insert_with_overlap_schema(big, schema_small(), 3, {(1, 2)}, random.Random(0))
    assert og.adjacency == {(0, 1)}
    assert len(max_independent_set(og, "exact")[0]) == 2
    assert set(_schema_graph(net, copies).edges) == {(0, 1)}


def test_schema_empty_pairs():
    big = generate(GeneratorParams(U=30, seed=0))
    net, og, copies = insert_with_overlap_schema(big, schema_small(), 4, set(), random.Random(0))
    assert og.adjacency == set() and _schema_graph(net, copies).number_of_edges() == 0


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_schema_realised_exactly(seed):
    rng = random.Random(seed)
    m = 10
    pairs = {(h, j) for h in range(1, m + 1) for j in range(h + 1, m + 1) if rng.random() < 0.3}
    big = generate(GeneratorParams(U=40, seed=seed))
    net, og, copies = insert_with_overlap_schema(big, schema_small(12), m, pairs, rng)
    assert validate_pure(net) == [] and validate_clear(net) == []
    expected = {(h - 1, j - 1) for h, j in pairs}
    assert og.adjacency == expected
    assert set(_schema_graph(net, copies).edges) == expected
    assert len(max_independent_set(og, "exact")[0]) == brute_mis_size(m, expected)


def test_schema_errors():
    big = generate(GeneratorParams(U=10, seed=0))
    with pytest.raises(ValueError):
        insert_with_overlap_schema(big, schema_small(), 3, {(1, 4)}, random.Random(0))
    with pytest.raises(ValueError):
        insert_with_overlap_schema(big, PetriNet({}, {0: "X"}, set()), 3, set(), random.Random(0))
    dense = {(h, j) for h in range(1, 6) for j in range(h + 1, 6)}
    with pytest.raises(NetError, match="pendant"):
        insert_with_overlap_schema(big, schema_small(3), 5, dense, random.Random(0))
    clash = PetriNet({1: "P"}, {0: "E0", 2: "E1"}, {(1, 0)})
    with pytest.raises(NetError, match="event labels"):
        insert_with_overlap_schema(generate(GeneratorParams(U=50, event_alphabet_size=2, seed=0)), clash, 2, set(),
                                   random.Random(0))
