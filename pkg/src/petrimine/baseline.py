"""Naive frequent complete-subnet miner that works on the Petri net itself.

Every connected set of at most ``max_events`` events is enumerated (two
events are connected when they share a condition), turned into its e-type
complete subnet and grouped by canonical form.  Support is an exact maximum
set of pairwise event-disjoint occurrences.  Nothing here reuses the net
graph search of :mod:`petrimine.miner`; only the canonical code is shared so
the two outputs can be compared key by key.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .canonical import code_to_str, min_code
from .miner import Embedding, FrequentPattern, MiningResult, Pattern, pattern_graph
from .netgraph import to_e_netgraph
from .petri import PetriNet

DEFAULT_MAX_OCCURRENCES = 1_000_000
BRUTE_FORCE_LIMIT = 20


class OracleScaleError(RuntimeError):
    """The instance is beyond what exhaustive enumeration should attempt."""


@dataclass(frozen=True)
class SubnetOccurrence:
    event_ids: frozenset
    condition_ids: frozenset
    arcs: frozenset

    def as_net(self, net: PetriNet) -> PetriNet:
        return PetriNet(
            {c: net.conditions[c] for c in self.condition_ids},
            {e: net.events[e] for e in self.event_ids},
            self.arcs,
        )


def event_adjacency(net: PetriNet) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {e: set() for e in net.events}
    for c in net.conditions:
        around = set(net.preset(c)) | set(net.postset(c))
        for e in around:
            adj[e] |= around - {e}
    return adj


def connected_event_sets(net: PetriNet, max_events: int, max_occurrences: int = DEFAULT_MAX_OCCURRENCES):
    """All connected event sets of size 1..max_events, smallest first."""
    adj = event_adjacency(net)
    layer = {frozenset([e]) for e in net.events}
    total = 0
    for size in range(1, max_events + 1):
        total += len(layer)
        if total > max_occurrences:
            raise OracleScaleError(
                f"more than {max_occurrences} connected event sets up to size {size}"
            )
        yield from sorted(layer, key=sorted)
        if size == max_events:
            break
        grown = set()
        for s in layer:
            frontier = set().union(*(adj[e] for e in s)) - s
            for w in frontier:
                grown.add(s | {w})
        layer = grown


def occurrence(net: PetriNet, events) -> SubnetOccurrence:
    sub = net.complete_subnet(events)
    return SubnetOccurrence(frozenset(sub.events), frozenset(sub.conditions), frozenset(sub.arcs))


def enumerate_complete_subnets(
    net: PetriNet,
    max_events: int,
    max_occurrences: int = DEFAULT_MAX_OCCURRENCES,
) -> dict[str, list[SubnetOccurrence]]:
    """Canonical form -> occurrences of every connected complete subnet up to the cap."""
    forms, _ = _enumerate(net, max_events, max_occurrences)
    return {code: [o for o, _ in occ] for code, occ in forms.items()}


def _enumerate(net, max_events, max_occurrences):
    if max_events < 1:
        raise ValueError("max_events must be at least 1")
    forms: dict[str, list] = defaultdict(list)
    keys: dict[str, tuple] = {}
    for events in connected_event_sets(net, max_events, max_occurrences):
        occ = occurrence(net, events)
        ng = to_e_netgraph(occ.as_net(net))
        key, order, _ = min_code(ng.tags, ng.adj)
        code = code_to_str(key)
        keys[code] = key
        forms[code].append((occ, (ng, order)))
    return forms, keys


def _exhaustive(vertices: list[int], nbrs: dict[int, set[int]], bound: bool) -> list[int]:
    """Largest independent set by include/exclude recursion."""
    best: list[int] = []

    def rec(rest: list[int], taken: list[int]):
        nonlocal best
        if bound and len(taken) + len(rest) <= len(best):
            return
        if not rest:
            if len(taken) > len(best):
                best = list(taken)
            return
        v, tail = rest[0], rest[1:]
        rec([w for w in tail if w not in nbrs[v]], taken + [v])
        rec(tail, taken)

    rec(sorted(vertices), [])
    return best


def disjoint_support(occurrences: list[SubnetOccurrence]) -> list[int]:
    """Indices of a maximum set of pairwise event-disjoint occurrences."""
    n = len(occurrences)
    nbrs = {i: set() for i in range(n)}
    owner: dict[int, list[int]] = defaultdict(list)
    for i, o in enumerate(occurrences):
        for e in o.event_ids:
            owner[e].append(i)
    for members in owner.values():
        for i in members:
            nbrs[i].update(j for j in members if j != i)
    chosen = []
    seen = set()
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        chosen.extend(_exhaustive(comp, nbrs, bound=len(comp) > BRUTE_FORCE_LIMIT))
    return sorted(chosen)


def mine_naive(
    net: PetriNet,
    min_sup: int,
    max_events: int,
    max_occurrences: int = DEFAULT_MAX_OCCURRENCES,
) -> MiningResult:
    """Frequent connected complete subnets of at most ``max_events`` events."""
    if min_sup < 1:
        raise ValueError("min_sup must be a positive integer")
    forms, keys = _enumerate(net, max_events, max_occurrences)
    patterns = []
    for code, occ in forms.items():
        if len(occ) < min_sup:
            continue
        chosen = disjoint_support([o for o, _ in occ])
        if len(chosen) < min_sup:
            continue
        ng, order = occ[0][1]
        key = keys[code]
        pat = Pattern(sum(len(u) for _, u in key), code, key, pattern_graph(ng, order))
        embs = [Embedding(occ[i][0].event_ids, tuple(occ[i][1][1])) for i in chosen]
        patterns.append(FrequentPattern(pat, len(chosen), embs, "exact", len(occ)))
    patterns.sort(key=lambda p: (p.level, p.code))
    return MiningResult(
        engine="digcarl",
        config={"min_sup": min_sup, "max_events": max_events, "max_occurrences": max_occurrences},
        noe=len(to_e_netgraph(net).edges),
        patterns=patterns,
        levels_explored=sorted({p.level for p in patterns}),
    )
