"""Overlap graphs and maximum independent sets over them.

Vertices are embedding indices ``0..n-1``.  The solvers work per connected
component: a component is solved exactly when the mode allows it and
greedily otherwise, and the union of the per-component answers is returned
sorted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

DEFAULT_AUTO_THRESHOLD = 60


@dataclass
class OverlapGraph:
    n: int
    adjacency: set = field(default_factory=set)  # {(a, b)} with a < b

    @property
    def vertices(self) -> list[int]:
        return list(range(self.n))

    def neighbor_sets(self) -> list[set[int]]:
        nbrs = [set() for _ in range(self.n)]
        for a, b in self.adjacency:
            nbrs[a].add(b)
            nbrs[b].add(a)
        return nbrs


def build_overlap_graph(
    covers: Sequence[Iterable[Hashable]],
    buckets: dict | None = None,
) -> OverlapGraph:
    """Overlap graph of embeddings given by the items each one covers.

    Every embedding is registered in ``buckets[item]`` for each item it
    covers; two embeddings are adjacent when they meet in some bucket.
    Passing a ``buckets`` dict lets the caller keep the registry.
    """
    if buckets is None:
        buckets = {}
    for idx, items in enumerate(covers):
        for h in items:
            buckets.setdefault(h, []).append(idx)
    adjacency = set()
    for members in buckets.values():
        if len(members) > 1:
            members = sorted(set(members))
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    adjacency.add((a, b))
    return OverlapGraph(len(covers), adjacency)


def _components(nbrs: list[set[int]]) -> list[list[int]]:
    seen = [False] * len(nbrs)
    out = []
    for s in range(len(nbrs)):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        i = 0
        while i < len(comp):
            for w in nbrs[comp[i]]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
            i += 1
        out.append(sorted(comp))
    return out


def _greedy(comp: list[int], nbrs: list[set[int]]) -> list[int]:
    alive = set(comp)
    deg = {v: len(nbrs[v] & alive) for v in comp}
    chosen = []
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        chosen.append(v)
        gone = (nbrs[v] & alive) | {v}
        alive -= gone
        for u in gone:
            for w in nbrs[u] & alive:
                deg[w] -= 1
    return sorted(chosen)


def _clique_cover_size(cand: int, masks: list[int]) -> int:
    """Greedy partition of ``cand`` into cliques; an upper bound on alpha."""
    count = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        clique_ok = masks[v]  # vertices adjacent to every clique member so far
        cand &= ~low
        grow = cand & clique_ok
        while grow:
            lw = grow & -grow
            w = lw.bit_length() - 1
            cand &= ~lw
            clique_ok &= masks[w]
            grow &= clique_ok & ~lw
        count += 1
    return count


def _exact(comp: list[int], nbrs: list[set[int]]) -> list[int]:
    local = {v: i for i, v in enumerate(comp)}
    masks = [0] * len(comp)
    for v in comp:
        m = 0
        for w in nbrs[v]:
            m |= 1 << local[w]
        masks[local[v]] = m

    best_size = 0
    best_set = 0

    def rec(cand: int, chosen: int, size: int) -> None:
        nonlocal best_size, best_set
        # vertices of degree <= 1 inside cand are always safe to take
        changed = True
        while changed and cand:
            changed = False
            c = cand
            while c:
                low = c & -c
                v = low.bit_length() - 1
                c &= ~low
                if not cand & low:
                    continue
                if (masks[v] & cand).bit_count() <= 1:
                    chosen |= low
                    size += 1
                    cand &= ~(low | masks[v])
                    changed = True
        if not cand:
            if size > best_size:
                best_size, best_set = size, chosen
            return
        if size + _clique_cover_size(cand, masks) <= best_size:
            return
        v, vdeg = -1, -1
        c = cand
        while c:
            low = c & -c
            u = low.bit_length() - 1
            c &= ~low
            d = (masks[u] & cand).bit_count()
            if d > vdeg:
                v, vdeg = u, d
        bit = 1 << v
        rec(cand & ~(bit | masks[v]), chosen | bit, size + 1)
        rec(cand & ~bit, chosen, size)

    rec((1 << len(comp)) - 1, 0, 0)
    return sorted(comp[i] for i in range(len(comp)) if best_set >> i & 1)


def max_independent_set(
    og: OverlapGraph,
    mode: str = "auto",
    threshold: int = DEFAULT_AUTO_THRESHOLD,
) -> tuple[list[int], str]:
    """Independent set of ``og`` and the mode that produced it.

    ``mode`` is ``"exact"``, ``"greedy"`` or ``"auto"``; auto solves a
    component exactly when it has at most ``threshold`` vertices.  The
    reported mode is ``"exact"`` when every component was solved exactly.
    """
    if mode not in ("exact", "greedy", "auto"):
        raise ValueError(f"unknown MIS mode {mode!r}")
    if threshold < 1:
        raise ValueError("auto threshold must be at least 1")
    nbrs = og.neighbor_sets()
    chosen: list[int] = []
    used_greedy = False
    for comp in _components(nbrs):
        if len(comp) == 1:
            chosen.extend(comp)
        elif mode == "exact" or (mode == "auto" and len(comp) <= threshold):
            chosen.extend(_exact(comp, nbrs))
        else:
            used_greedy = True
            chosen.extend(_greedy(comp, nbrs))
    return sorted(chosen), ("greedy" if used_greedy else "exact")


def is_independent(og: OverlapGraph, subset: Iterable[int]) -> bool:
    s = set(subset)
    return not any(a in s and b in s for a, b in og.adjacency)
