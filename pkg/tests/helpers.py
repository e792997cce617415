"""Independent oracles and builders shared by the test modules."""

from __future__ import annotations

import random
from collections import defaultdict

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import DiGraphMatcher

from petrimine.canonical import BACKWARD, FORWARD
from petrimine.petri import PetriNet, parse_cenet

TWO_CHAINS = """\
event 1 A
event 2 B
cond 3 P
cond 4 Q
cond 5 R
arc 3 1
arc 1 4
arc 4 2
arc 2 5
event 11 A
event 12 B
cond 13 P
cond 14 Q
cond 15 R
arc 13 11
arc 11 14
arc 14 12
arc 12 15
"""


def two_chains() -> PetriNet:
    return parse_cenet(TWO_CHAINS)


def random_clear_net(
    rng: random.Random,
    n_events: int,
    event_labels: int = 3,
    cond_labels: int = 3,
    max_in: int = 2,
    max_out: int = 2,
    reuse: float = 0.5,
) -> PetriNet:
    """Random pure clear net; conditions are shared between events with probability ``reuse``."""
    conditions: dict[int, str] = {}
    events: dict[int, str] = {}
    arcs: set = set()
    by_label = defaultdict(list)
    nid = 0
    for _ in range(n_events):
        e = nid
        nid += 1
        events[e] = f"E{rng.randrange(event_labels)}"
        touched = set()
        for side in ("in", "out"):
            k = rng.randint(0 if side == "out" else 1, max_in if side == "in" else max_out)
            for lab in rng.sample([f"C{i}" for i in range(cond_labels)], min(k, cond_labels)):
                pool = [c for c in by_label[lab] if c not in touched]
                if pool and rng.random() < reuse:
                    c = rng.choice(pool)
                else:
                    c = nid
                    nid += 1
                    conditions[c] = lab
                    by_label[lab].append(c)
                touched.add(c)
                arcs.add((c, e) if side == "in" else (e, c))
    return PetriNet(conditions, events, arcs)


def permute_ids(net: PetriNet, rng: random.Random) -> PetriNet:
    ids = sorted(net.nodes)
    new = list(range(1000, 1000 + len(ids)))
    rng.shuffle(new)
    return net.rename(dict(zip(ids, new)))


def net_digraph(net: PetriNet) -> nx.DiGraph:
    g = nx.DiGraph()
    for c, lab in net.conditions.items():
        g.add_node(c, kind="c", label=lab)
    for e, lab in net.events.items():
        g.add_node(e, kind="e", label=lab)
    g.add_edges_from(net.arcs)
    return g


def nets_isomorphic(a: PetriNet, b: PetriNet) -> bool:
    return nx.is_isomorphic(
        net_digraph(a), net_digraph(b),
        node_match=lambda x, y: x["kind"] == y["kind"] and x["label"] == y["label"],
    )


def ng_digraph(tags, adj) -> nx.DiGraph:
    g = nx.DiGraph()
    for v, t in tags.items():
        g.add_node(v, tag=t)
    for u, nb in adj.items():
        for v, t in nb.items():
            g.add_edge(u, v, tag=t)
    return g


def ng_isomorphic(tags1, adj1, tags2, adj2) -> bool:
    return DiGraphMatcher(
        ng_digraph(tags1, adj1), ng_digraph(tags2, adj2),
        node_match=lambda x, y: x["tag"] == y["tag"],
        edge_match=lambda x, y: x["tag"] == y["tag"],
    ).is_isomorphic()


def brute_mis_size(n: int, edges) -> int:
    """Maximum independent set size by checking all 2**n vertex subsets."""
    if n == 0:
        return 0
    masks = np.arange(1 << n, dtype=np.int64)
    bad = np.zeros(1 << n, dtype=bool)
    for a, b in edges:
        bad |= ((masks >> a) & 1).astype(bool) & ((masks >> b) & 1).astype(bool)
    sizes = np.bitwise_count(masks.astype(np.uint64))
    return int(sizes[~bad].max())


def exhaustive_code(tags, adj):
    """Smallest code over every rule-following traversal, without pruning or twin merging."""
    best = None
    start_tag = min(tags.values())

    def walk(order, index, stack, units):
        nonlocal best
        while stack:
            cur = stack[-1]
            fwd = [(adj[cur][v], tags[v], v) for v in adj[cur] if v not in index]
            if not fwd:
                stack = stack[:-1]
                continue
            e0, t0, _ = min(fwd)
            for _, _, v in [f for f in fwd if f[0] == e0 and f[1] == t0]:
                j = len(order)
                o2, i2 = order + [v], {**index, v: j}
                u2 = units + [(index[cur], j, FORWARD, adj[cur][v], tags[v])]
                for i, w in sorted((i2[w], w) for w in adj[v] if w in i2 and w != cur):
                    u2.append((j, i, BACKWARD, adj[v][w], None))
                walk(o2, i2, stack + [v], u2)
            return
        code = (start_tag, tuple(units))
        if best is None or code < best:
            best = code

    for s in tags:
        if tags[s] == start_tag:
            walk([s], {s: 0}, [s], [])
    return best


def esu_connected_sets(adj: dict, k: int) -> set:
    """Connected vertex sets of size 1..k by the ESU extension scheme."""
    out = set()

    def extend(sub, ext, v):
        out.add(frozenset(sub))
        if len(sub) == k:
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            excl = set().union(*(adj[u] for u in sub)) | sub
            new = {u for u in adj[w] if u > v and u not in excl}
            extend(sub | {w}, ext | new, v)

    for v in adj:
        extend({v}, {u for u in adj[v] if u > v}, v)
    return out


def event_graph(net: PetriNet) -> dict:
    adj = {e: set() for e in net.events}
    for c in net.conditions:
        around = set(net.preset(c)) | set(net.postset(c))
        for e in around:
            adj[e] |= around - {e}
    return adj


def isomorphism_patterns(net: PetriNet, min_sup: int, max_events: int) -> list[tuple[PetriNet, int]]:
    """Frequent connected complete subnets grouped by networkx isomorphism, support by 2**n MIS."""
    groups: list[list] = []
    for s in sorted(esu_connected_sets(event_graph(net), max_events), key=lambda s: (len(s), sorted(s))):
        sub = net.complete_subnet(s)
        for grp in groups:
            if len(grp[0][1]) == len(s) and nets_isomorphic(grp[0][0], sub):
                grp.append((sub, s))
                break
        else:
            groups.append([(sub, s)])
    out = []
    for grp in groups:
        if len(grp) < min_sup:
            continue
        n = len(grp)
        assert n <= 20, "oracle instance too large"
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if grp[i][1] & grp[j][1]]
        sup = brute_mis_size(n, edges)
        if sup >= min_sup:
            out.append((grp[0][0], sup))
    return out
