"""Minimal depth-first traversal codes for net graphs.

A traversal starts at a node with the smallest tagging.  Whenever a node is
entered, its edges back to already visited nodes are emitted first (closest
to the root first); then the traversal moves along the forward edge with the
smallest ``(edge tagging, far node tagging)`` and backtracks when a node has
no unvisited neighbour left.

Local choices can tie (equal taggings on both the edge and the far node).
Each tied branch is explored and the lexicographically smallest code is
kept, except that twin nodes (swappable by an automorphism that fixes the
traversal state) are explored once.  Branches are cut as soon as their code
prefix exceeds the best complete code.

A code unit is ``(from, to, dir, edge tagging, far tagging)`` with ``dir`` 0
for backward and 1 for forward edges; backward units carry no far tagging.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, NamedTuple

from .netgraph import (
    EdgeTagging,
    NetGraph,
    NodeTagging,
    parse_edge_tagging,
    parse_node_tagging,
)

BACKWARD, FORWARD = 0, 1


class DisconnectedPatternError(ValueError):
    pass


class NodeRecord(NamedTuple):
    visit_index: int
    gnode: int
    tagging: NodeTagging


class EdgeRecord(NamedTuple):
    from_index: int
    to_index: int
    direction: str  # "forward" | "backward"
    tagging: EdgeTagging


class TraversalResult(NamedTuple):
    min_e0: list
    min_e1: list
    noe: int
    code: tuple  # one (start tagging, units) pair per component
    ties: int  # forward choices that needed branching

    def gnode(self, visit_index: int) -> int:
        return self.min_e0[visit_index].gnode

    def __str__(self):
        return code_to_str(self.code)


class _State:
    __slots__ = ("order", "index", "stack", "units", "better", "version")

    def __init__(self, order, index, stack, units, better, version):
        self.order = order
        self.index = index
        self.stack = stack
        self.units = units
        self.better = better
        self.version = version

    def clone(self) -> _State:
        return _State(
            list(self.order), dict(self.index), list(self.stack), list(self.units),
            self.better, self.version,
        )


def _twins(adj, a, b) -> bool:
    na, nb = adj[a], adj[b]
    if len(na) != len(nb):
        return False
    for w, t in na.items():
        if w == b:
            if nb.get(a) != t:
                return False
        elif nb.get(w) != t:
            return False
    return True


def _distinct_up_to_twins(adj, candidates: list) -> list:
    reps = []
    for v in candidates:
        if not any(_twins(adj, r, v) for r in reps):
            reps.append(v)
    return reps


class _Search:
    """Branch-and-bound over tie choices inside one connected component."""

    def __init__(self, tags, adj):
        self.tags = tags
        self.adj = adj
        self.best: _State | None = None
        self.version = 0
        self.ties = 0

    def _emit(self, st: _State, unit) -> bool:
        if self.best is not None and not st.better:
            ref = self.best.units[len(st.units)]
            if unit > ref:
                return False
            if unit < ref:
                st.better = True
        st.units.append(unit)
        return True

    def _visit(self, st: _State, cur, v) -> bool:
        tags, adj = self.tags, self.adj
        j = len(st.order)
        st.order.append(v)
        st.index[v] = j
        st.stack.append(v)
        if not self._emit(st, (st.index[cur], j, FORWARD, adj[cur][v], tags[v])):
            return False
        back = sorted((st.index[w], w) for w in adj[v] if w in st.index and w != cur)
        for i, w in back:
            if not self._emit(st, (j, i, BACKWARD, adj[v][w], None)):
                return False
        return True

    def _resync(self, st: _State) -> bool:
        if st.version == self.version or self.best is None:
            return True
        st.version = self.version
        prefix = self.best.units[: len(st.units)]
        if st.units > prefix:
            return False
        st.better = st.units < prefix
        return True

    def _finish(self, st: _State) -> None:
        if self.best is None or st.better:
            st.better = False
            self.best = st
            self.version += 1

    def run(self, starts: list, branch: bool = True) -> _State:
        if branch:
            starts = _distinct_up_to_twins(self.adj, starts)
        work = [_State([s], {s: 0}, [s], [], False, self.version) for s in reversed(starts)]
        tags, adj = self.tags, self.adj
        while work:
            st = work.pop()
            if not self._resync(st):
                continue
            alive = True
            while st.stack:
                cur = st.stack[-1]
                fwd = [(adj[cur][v], tags[v], v) for v in adj[cur] if v not in st.index]
                if not fwd:
                    st.stack.pop()
                    continue
                e0, t0, v0 = min(fwd)
                tied = sorted(v for e, t, v in fwd if e == e0 and t == t0)
                if len(tied) > 1 and branch:
                    reps = _distinct_up_to_twins(adj, tied)
                    if len(reps) > 1:
                        self.ties += 1
                        for v in reversed(reps[1:]):
                            branch = st.clone()
                            if self._visit(branch, cur, v):
                                work.append(branch)
                        # continue this state with the first representative
                    v0 = reps[0]
                elif tied:
                    v0 = tied[0]
                if not self._visit(st, cur, v0):
                    alive = False
                    break
            if alive:
                self._finish(st)
        return self.best


def components(adj: Mapping[int, Mapping]) -> list[list[int]]:
    seen = set()
    out = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        i = 0
        while i < len(comp):
            for w in adj[comp[i]]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
            i += 1
        out.append(sorted(comp))
    return out


def min_code(tags: Mapping[int, NodeTagging], adj: Mapping[int, Mapping], exact: bool = True) -> tuple[tuple, list, int]:
    """Minimal code of a (possibly disconnected) tagged graph.

    Returns ``(code, order, ties)``: the code is a tuple of per-component
    ``(start tagging, units)`` pairs sorted ascending; ``order`` lists node ids
    in global visit order.  ``adj`` must only mention nodes present in
    ``tags`` and hold taggings oriented away from the key node.  With
    ``exact=False`` each component is walked once from its lowest-id start
    node, taking the lowest id on ties: same records, no minimality.
    """
    results = []
    ties = 0
    for comp in components(adj):
        start_tag = min(tags[g] for g in comp)
        starts = [g for g in comp if tags[g] == start_tag]
        search = _Search(tags, adj)
        best = search.run(starts if exact else starts[:1], branch=exact)
        ties += search.ties
        results.append(((start_tag, tuple(best.units)), best.order))
    results.sort(key=lambda r: r[0])
    code = tuple(r[0] for r in results)
    order = [g for r in results for g in r[1]]
    return code, order, ties


def restrict(adj: Mapping[int, Mapping], nodes: Iterable[int]) -> dict[int, dict]:
    keep = set(nodes)
    return {u: {v: t for v, t in adj[u].items() if v in keep} for u in keep}


def minimal_dfs_traversal(ng: NetGraph) -> TraversalResult:
    return _traversal(ng, True)


def dfs_traversal(ng: NetGraph) -> TraversalResult:
    """One greedy pass per component with the same visiting rules.

    Gives the node and edge records mining needs without the search over
    tied starts and branches, which grows quickly on large repetitive
    graphs.  The code is not canonical.
    """
    return _traversal(ng, False)


def _traversal(ng: NetGraph, exact: bool) -> TraversalResult:
    code, order, ties = min_code(ng.tags, ng.adj, exact)
    min_e0 = [NodeRecord(i, g, ng.tagging(g)) for i, g in enumerate(order)]
    min_e1 = []
    offset = 0
    for start, units in code:
        size = 1 + sum(1 for u in units if u[2] == FORWARD)
        for i, j, d, etag, _ in units:
            min_e1.append(
                EdgeRecord(i + offset, j + offset, "forward" if d == FORWARD else "backward", etag)
            )
        offset += size
    return TraversalResult(min_e0, min_e1, len(min_e1), code, ties)


def _unit_str(unit) -> str:
    i, j, d, etag, ftag = unit
    if d == FORWARD:
        return f"({i},{j},f,{etag},{ftag})"
    return f"({i},{j},b,{etag})"


def component_str(comp) -> str:
    start, units = comp
    return str(start) + "".join(_unit_str(u) for u in units)


def code_to_str(code: tuple) -> str:
    return "|".join(component_str(c) for c in code)


def canonical_code(pattern: NetGraph) -> str:
    """Canonical string of a connected pattern graph."""
    if len(components(pattern.adj)) > 1:
        raise DisconnectedPatternError("pattern graph is not connected")
    code, _, _ = min_code(pattern.tags, pattern.adj)
    return code_to_str(code)


_START_RE = re.compile(r"[A-Za-z0-9_.]+<[^>]*>")
_UNIT_RE = re.compile(r"\((\d+),(\d+),([bf]),(\[[^\]]*\])(?:,([^)]*))?\)")


def parse_code(text: str) -> tuple:
    """Inverse of :func:`code_to_str`."""
    if text == "":
        return ()
    comps = []
    for part in text.split("|"):
        m = _START_RE.match(part)
        if not m:
            raise ValueError(f"malformed code component {part!r}")
        start = parse_node_tagging(m.group(0))
        pos = m.end()
        units = []
        while pos < len(part):
            u = _UNIT_RE.match(part, pos)
            if not u:
                raise ValueError(f"malformed code unit at {part[pos:pos + 20]!r}")
            i, j, d, etag, ftag = u.groups()
            forward = d == "f"
            if forward != (ftag is not None):
                raise ValueError(f"malformed code unit {u.group(0)!r}")
            units.append((
                int(i), int(j), FORWARD if forward else BACKWARD,
                parse_edge_tagging(etag),
                parse_node_tagging(ftag) if forward else None,
            ))
            pos = u.end()
        comps.append((start, tuple(units)))
    return tuple(comps)


def code_compare(a: str, b: str) -> int:
    """-1, 0 or 1 as code ``a`` sorts before, equal to or after ``b``."""
    ca, cb = parse_code(a), parse_code(b)
    return (ca > cb) - (ca < cb)


def code_nodes(code_str: str) -> int:
    """Number of pattern nodes encoded in a code string."""
    return sum(1 + sum(1 for u in units if u[2] == FORWARD) for _, units in parse_code(code_str))


def code_edges(code_str: str) -> int:
    return sum(len(units) for _, units in parse_code(code_str))
