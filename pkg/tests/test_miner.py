import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import isomorphism_patterns, nets_isomorphic, random_clear_net, two_chains
from petrimine.baseline import mine_naive
from petrimine.canonical import components, minimal_dfs_traversal, restrict
from petrimine.miner import (
    MiningConfig,
    MiningRegistries,
    extend_patterns,
    level0_patterns,
    level1_patterns,
    mine,
    read_result,
    to_subnets,
)
from petrimine.netgraph import from_e_netgraph, to_e_netgraph
from petrimine.petri import PetriNet, is_complete_subnet, parse_cenet, serialize_cenet

EXACT_COMPLETE = dict(mis_mode="exact", extension="complete")


def small_net(seed, n=None):
    rng = random.Random(seed)
    return random_clear_net(rng, n or rng.randint(2, 9), event_labels=2, cond_labels=2, reuse=0.6)


def test_level0_grouping():
    base = two_chains()
    net = PetriNet({**base.conditions, 40: "R"}, {**base.events, 41: "C"}, base.arcs | {(40, 41)})
    ng = to_e_netgraph(net)
    tr = minimal_dfs_traversal(ng)
    f0 = level0_patterns(tr, MiningConfig(2), ng)
    assert sorted(fp.code for fp in f0.values()) == ["A<-P+Q>", "B<-Q+R>"]
    assert len(level0_patterns(tr, MiningConfig(1), ng)) == 3
    empty = to_e_netgraph(PetriNet())
    assert level0_patterns(minimal_dfs_traversal(empty), MiningConfig(1), empty) == {}


def test_level1_two_disjoint_copies():
    ng = to_e_netgraph(two_chains())
    f1, _ = level1_patterns(minimal_dfs_traversal(ng), MiningConfig(2), ng)
    (fp,) = f1.values()
    assert fp.code == "A<-P+Q>(0,1,f,[+Q-],B<-Q+R>)" and fp.support == 2


def test_level1_shared_event_and_star():
    shared = parse_cenet(
        "event 1 A\nevent 2 B\nevent 3 B\ncond 4 Q\ncond 5 R\ncond 6 R\n"
        "arc 1 4\narc 4 2\narc 4 3\narc 2 5\narc 3 6\n"
    )
    star = parse_cenet(
        "event 1 A\nevent 2 B\nevent 3 B\nevent 7 B\ncond 4 Q\ncond 5 R\ncond 6 R\ncond 8 R\n"
        "arc 1 4\narc 4 2\narc 4 3\narc 4 7\narc 2 5\narc 3 6\narc 7 8\n"
    )
    for net in (shared, star):
        ng = to_e_netgraph(net)
        tr = minimal_dfs_traversal(ng)
        f1, stats = level1_patterns(tr, MiningConfig(2, mis_mode="exact"), ng)
        assert "A<+Q>(0,1,f,[+Q-],B<-Q+R>)" not in {fp.code for fp in f1.values()}
        f1, _ = level1_patterns(tr, MiningConfig(1, mis_mode="exact"), ng)
        assert {fp.code: fp.support for fp in f1.values()}["A<+Q>(0,1,f,[+Q-],B<-Q+R>)"] == 1


def test_extension_two_chains():
    text = "\n".join(
        f"event {o+1} A\nevent {o+2} B\nevent {o+3} C\ncond {o+4} P\ncond {o+5} Q\ncond {o+6} R\n"
        f"arc {o+1} {o+4}\narc {o+4} {o+2}\narc {o+2} {o+5}\narc {o+5} {o+3}\narc {o+3} {o+6}"
        for o in (0, 10)
    )
    ng = to_e_netgraph(parse_cenet(text))
    cfg = MiningConfig(2, **EXACT_COMPLETE)
    reg = MiningRegistries()
    tr = minimal_dfs_traversal(ng)
    level1_patterns(tr, cfg, ng, reg)
    fresh = extend_patterns(1, reg, cfg, ng)
    assert list(fresh) == [2]
    (cand,) = fresh[2].values()
    # reached from both A-B and B-C, recorded once with the two chains as embeddings
    assert len(cand.embeddings) == 2 and len(cand.parent_hits) == 2
    res = mine(ng, cfg)
    assert res.by_code()[next(p.code for p in res.patterns if p.level == 2)].support == 2


def test_no_candidate_without_matching_edge():
    ng = to_e_netgraph(two_chains())
    cfg = MiningConfig(2)
    reg = MiningRegistries()
    level1_patterns(minimal_dfs_traversal(ng), cfg, ng, reg)
    assert extend_patterns(1, reg, cfg, ng) == {}


def test_mine_two_chains_early_stop():
    ng = to_e_netgraph(two_chains())
    res = mine(ng, MiningConfig(2))
    assert res.levels_explored == [0, 1]
    assert res.early_stop == {"level": 2, "bound": 1, "dropped_candidates": 0}
    assert [(p.level, p.support) for p in res.patterns] == [(0, 2), (0, 2), (1, 2)]


def test_min_sup_above_event_count():
    ng = to_e_netgraph(two_chains())
    assert mine(ng, MiningConfig(5)).patterns == []


def test_invalid_config():
    ng = to_e_netgraph(two_chains())
    for bad in (MiningConfig(0), MiningConfig(2, mis_mode="x"), MiningConfig(2, mis_threshold=0),
                MiningConfig(2, extension="x"), MiningConfig(2, overlap="x")):
        with pytest.raises(ValueError):
            mine(ng, bad)
    assert MiningConfig.parse_mis("auto:12") == ("auto", 12)
    with pytest.raises(ValueError):
        MiningConfig.parse_mis("exact:3")


def test_condition_overlap_is_not_event_overlap():
    net = parse_cenet(
        "event 1 A\nevent 2 B\nevent 3 B\ncond 4 Q\ncond 5 R\ncond 6 R\n"
        "arc 1 4\narc 4 2\narc 4 3\narc 2 5\narc 3 6\n"
    )
    ng = to_e_netgraph(net)
    by_event = mine(ng, MiningConfig(1, mis_mode="exact")).supports()
    by_cond = mine(ng, MiningConfig(1, mis_mode="exact", overlap="condition")).supports()
    assert by_event["B<-Q+R>"] == 2  # the two B's share only condition Q
    assert by_cond["B<-Q+R>"] == 1


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
@settings(max_examples=60, deadline=None)
def test_matches_isomorphism_oracle(seed, min_sup):
    net = small_net(seed)
    res = mine(to_e_netgraph(net), MiningConfig(min_sup, **EXACT_COMPLETE))
    mined = [(from_e_netgraph(fp.pattern.graph), fp.support) for fp in res.patterns]
    oracle = isomorphism_patterns(net, min_sup, len(net.events))
    assert len(mined) == len(oracle)
    for pnet, sup in oracle:
        hits = [s for m, s in mined if len(m.events) == len(pnet.events) and nets_isomorphic(m, pnet)]
        assert hits == [sup]


@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
@settings(max_examples=40, deadline=None)
def test_support_anti_monotone(seed, min_sup):
    net = small_net(seed, 9)
    ng = to_e_netgraph(net)
    res = mine(ng, MiningConfig(min_sup, **EXACT_COMPLETE))
    exact = mine_naive(net, 1, len(net.events)).supports()
    for fp in res.patterns:
        nodes = set(fp.embeddings[0].gnodes)
        if len(nodes) < 2:
            continue
        for v in nodes:
            rest = nodes - {v}
            if len(components(restrict(ng.adj, rest))) != 1:
                continue
            sub = mine_naive(net.complete_subnet(rest), 1, len(rest))
            code = max(sub.patterns, key=lambda p: p.pattern.size).code
            assert exact[code] >= fp.support


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_embeddings_disjoint_and_complete(seed):
    net = small_net(seed, 10)
    ng = to_e_netgraph(net)
    res = mine(ng, MiningConfig(2))
    for (pattern, subnets), fp in zip(to_subnets(res, ng), res.patterns):
        assert nets_isomorphic(pattern, subnets[0]) or len(fp.embeddings) == 0
        seen = set()
        for s in subnets:
            assert is_complete_subnet(s, net)
            assert not seen & set(s.events)
            seen |= set(s.events)
        for e in fp.embeddings:
            assert [ng.tagging(g) for g in e.node_map] == [fp.pattern.graph.tagging(i) for i in range(fp.pattern.size)]


def test_level0_pattern_as_petri_net():
    ng = to_e_netgraph(two_chains())
    res = mine(ng, MiningConfig(2))
    pattern, subnets = to_subnets(res, ng)[0]
    assert res.patterns[0].code == "A<-P+Q>"
    assert sorted(pattern.events.values()) == ["A"]
    assert sorted(pattern.conditions.values()) == ["P", "Q"]
    assert sorted(sorted(s.events) for s in subnets) == [[1], [11]]


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
@settings(max_examples=40, deadline=None)
def test_early_stop_sound(seed, min_sup):
    net = small_net(seed, 12)
    ng = to_e_netgraph(net)
    res = mine(ng, MiningConfig(min_sup, **EXACT_COMPLETE))
    for L in res.levels_explored:
        assert L <= 1 or L * min_sup <= res.noe
    for p in mine_naive(net, min_sup, 5).patterns:
        assert p.level <= 1 or p.level * min_sup <= res.noe


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_complete_dominates_paper(seed):
    net = small_net(seed, 12)
    ng = to_e_netgraph(net)
    paper = mine(ng, MiningConfig(2, mis_mode="exact")).supports()
    complete = mine(ng, MiningConfig(2, **EXACT_COMPLETE)).supports()
    for code, sup in paper.items():
        assert complete[code] >= sup


def test_max_level_cap():
    net = small_net(11, 12)
    ng = to_e_netgraph(net)
    res = mine(ng, MiningConfig(1, max_level=1))
    assert max(p.level for p in res.patterns) <= 1


def test_deterministic_serialisation(tmp_path):
    net = small_net(4, 12)
    ng = to_e_netgraph(net)
    a = mine(ng, MiningConfig(2)).to_json(ng)
    b = mine(to_e_netgraph(parse_cenet(serialize_cenet(net))), MiningConfig(2)).to_json(ng)
    assert a == b
    path = tmp_path / "r.json"
    path.write_text(a)
    doc = read_result(path)
    assert doc["engine"] == "bigcarl"
    assert all(p["embeddings"] == sorted(p["embeddings"]) for p in doc["patterns"])


def test_read_result_rejects_foreign_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"schema": "other"}))
    with pytest.raises(ValueError):
        read_result(path)


def test_keep_overlap_graphs():
    net = small_net(8, 10)
    ng = to_e_netgraph(net)
    res = mine(ng, MiningConfig(1, keep_overlap_graphs=True))
    for fp in res.patterns:
        if fp.level >= 1:
            embs, og = res.overlap_graphs[fp.code]
            assert og.n == len(embs) == fp.candidates


def test_mining_rejects_c_graphs():
    from petrimine.netgraph import to_c_netgraph

    with pytest.raises(ValueError):
        mine(to_c_netgraph(two_chains()), MiningConfig(1))


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
@settings(max_examples=40, deadline=None)
def test_result_independent_of_traversal(seed, min_sup):
    import petrimine.miner as miner_mod

    net = small_net(seed, 14)
    ng = to_e_netgraph(net)
    for cfg in (MiningConfig(min_sup), MiningConfig(min_sup, **EXACT_COMPLETE)):
        greedy = mine(ng, cfg).to_json(ng)
        saved = miner_mod.dfs_traversal
        miner_mod.dfs_traversal = minimal_dfs_traversal
        try:
            exact = mine(ng, cfg).to_json(ng)
        finally:
            miner_mod.dfs_traversal = saved
        assert greedy == exact
