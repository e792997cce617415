"""Level-wise frequent sub-net-graph mining on one large net graph.

Patterns are connected sets of net-graph nodes taken together with every
edge among them, which is exactly an e-type complete subnet of the source
net.  The level of a pattern is its edge count.  Support is the size of an
independent set in the overlap graph of the pattern's embeddings.

Growth attaches one new node to an embedding through an edge that belongs
to a frequent 1-edge pattern.  The new node may close further edges, so a
level-k pattern can produce candidates at any level above k; levels are
processed in ascending order and a level L is only entered while
``L * min_sup <= NoE``.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .canonical import FORWARD, code_to_str, dfs_traversal, min_code, restrict
from .mis import DEFAULT_AUTO_THRESHOLD, OverlapGraph, build_overlap_graph, max_independent_set
from .netgraph import EdgeTagging, NetGraph, from_e_netgraph, subnet_of
from .petri import PetriNet

log = logging.getLogger(__name__)

RESULT_SCHEMA = "petrimine.result/1"


@dataclass
class MiningConfig:
    min_sup: int
    mis_mode: str = "auto"
    mis_threshold: int = DEFAULT_AUTO_THRESHOLD
    extension: str = "paper"  # "paper": grow MIS survivors; "complete": grow every embedding
    overlap: str = "event"  # "event": embeddings clash on shared events; "condition": on shared conditions
    max_level: int | None = None
    keep_overlap_graphs: bool = False

    def validate(self) -> None:
        if not isinstance(self.min_sup, int) or self.min_sup < 1:
            raise ValueError("min_sup must be a positive integer")
        if self.mis_mode not in ("exact", "greedy", "auto"):
            raise ValueError(f"unknown MIS mode {self.mis_mode!r}")
        if self.mis_threshold < 1:
            raise ValueError("auto threshold must be at least 1")
        if self.extension not in ("paper", "complete"):
            raise ValueError(f"unknown extension mode {self.extension!r}")
        if self.overlap not in ("event", "condition"):
            raise ValueError(f"unknown overlap mode {self.overlap!r}")
        if self.max_level is not None and self.max_level < 0:
            raise ValueError("max_level must be non-negative")

    @staticmethod
    def parse_mis(text: str) -> tuple[str, int]:
        """``exact`` | ``greedy`` | ``auto`` | ``auto:N`` -> (mode, threshold)."""
        mode, _, n = text.partition(":")
        if mode not in ("exact", "greedy", "auto") or (n and mode != "auto"):
            raise ValueError(f"bad MIS mode {text!r}")
        return mode, int(n) if n else DEFAULT_AUTO_THRESHOLD


@dataclass(frozen=True)
class Embedding:
    """One occurrence: big-graph nodes, and ``node_map[i]`` = image of pattern node ``i``."""

    gnodes: frozenset
    node_map: tuple = ()

    def gedges(self, ng: NetGraph) -> list[tuple[int, int]]:
        return sorted(k for k in ng.edges if k[0] in self.gnodes and k[1] in self.gnodes)


@dataclass
class Pattern:
    level: int
    code: str
    key: tuple
    graph: NetGraph

    @property
    def size(self) -> int:
        return len(self.graph.nodes)


@dataclass
class FrequentPattern:
    pattern: Pattern
    support: int
    embeddings: list  # the chosen pairwise non-overlapping embeddings
    mis_mode: str
    candidates: int  # embeddings the support was computed from

    @property
    def code(self) -> str:
        return self.pattern.code

    @property
    def level(self) -> int:
        return self.pattern.level


@dataclass
class Candidate:
    """A MinFC entry together with its MinFEC embedding list."""

    key: tuple
    level: int
    embeddings: dict = field(default_factory=dict)  # frozenset -> Embedding
    parent_hits: dict = field(default_factory=lambda: defaultdict(set))

    def support_bound(self) -> int:
        return max((len(s) for s in self.parent_hits.values()), default=0)


@dataclass
class MiningRegistries:
    candidates: dict = field(default_factory=lambda: defaultdict(dict))  # MinFC / MinFEC
    frequent: dict = field(default_factory=lambda: defaultdict(dict))  # MinF: level -> key -> FrequentPattern
    buckets: dict = field(default_factory=dict)  # S[h] of the level being filtered
    edge_pool: set = field(default_factory=set)  # 1-edge embeddings usable for growth


@dataclass
class MiningResult:
    engine: str
    config: dict
    noe: int
    patterns: list
    levels_explored: list
    early_stop: dict | None = None
    level_stats: list = field(default_factory=list)
    overlap_graphs: dict = field(default_factory=dict)  # code -> (embeddings, OverlapGraph)

    def supports(self, max_nodes: int | None = None) -> dict[str, int]:
        return {
            p.code: p.support
            for p in self.patterns
            if max_nodes is None or p.pattern.size <= max_nodes
        }

    def by_code(self) -> dict[str, FrequentPattern]:
        return {p.code: p for p in self.patterns}

    def to_dict(self, ng: NetGraph | None = None) -> dict:
        pats = []
        for p in sorted(self.patterns, key=lambda p: (p.level, p.code)):
            embs = []
            for e in p.embeddings:
                ids = sorted(ng.source(g) for g in e.gnodes) if ng is not None else sorted(e.gnodes)
                embs.append(ids)
            pats.append({
                "level": p.level,
                "nodes": p.pattern.size,
                "code": p.code,
                "support": p.support,
                "mis": p.mis_mode,
                "candidates": p.candidates,
                "embeddings": sorted(embs),
            })
        return {
            "schema": RESULT_SCHEMA,
            "engine": self.engine,
            "config": self.config,
            "noe": self.noe,
            "levels_explored": self.levels_explored,
            "early_stop": self.early_stop,
            "level_stats": self.level_stats,
            "patterns": pats,
        }

    def to_json(self, ng: NetGraph | None = None) -> str:
        return json.dumps(self.to_dict(ng), sort_keys=True, indent=1) + "\n"


def read_result(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != RESULT_SCHEMA:
        raise ValueError(f"{path}: not a mining result document")
    for p in doc["patterns"]:
        for k in ("code", "support", "level", "embeddings"):
            if k not in p:
                raise ValueError(f"{path}: pattern entry missing {k!r}")
    return doc


def pattern_graph(ng: NetGraph, order: list[int]) -> NetGraph:
    """The induced subgraph on ``order`` renumbered ``0..n-1`` in that order."""
    pos = {g: i for i, g in enumerate(order)}
    tags = {i: ng.tagging(g) for i, g in enumerate(order)}
    edges = {}
    for i, g in enumerate(order):
        for w, t in ng.adj[g].items():
            j = pos.get(w)
            if j is None or j < i:
                continue
            if (tags[i], i) < (tags[j], j):
                edges[(i, j)] = t
            else:
                edges[(j, i)] = t.reversed()
    return NetGraph(ng.kind, {i: (i, tags[i]) for i in tags}, dict(sorted(edges.items())), {})


def _cover(ng: NetGraph, cfg: MiningConfig):
    if cfg.overlap == "event":
        return lambda emb: emb.gnodes
    slots = ng.slot_sources
    return lambda emb: {c for g in emb.gnodes for c in slots[g]}


def _level_of(key: tuple) -> int:
    return sum(len(units) for _, units in key)


class _Coder:
    """Canonical keys of induced node sets, memoised per mining run."""

    def __init__(self, ng: NetGraph):
        self.ng = ng
        self.memo: dict[frozenset, tuple] = {}

    def __call__(self, nodes: frozenset) -> tuple[tuple, tuple]:
        hit = self.memo.get(nodes)
        if hit is None:
            key, order, _ = min_code(self.ng.tags, restrict(self.ng.adj, nodes))
            hit = (key, tuple(order))
            self.memo[nodes] = hit
        return hit


def _filter(
    cands: Iterable[Candidate],
    ng: NetGraph,
    cfg: MiningConfig,
    reg: MiningRegistries,
    result_graphs: dict | None,
) -> tuple[dict, dict]:
    """MIS-filter candidates into frequent patterns; returns (frequent, stats)."""
    cover = _cover(ng, cfg)
    frequent = {}
    stats = {"candidates": 0, "frequent": 0, "embeddings": 0, "overlap_edges": 0, "mis_total": 0}
    for cand in cands:
        embs = sorted(cand.embeddings.values(), key=lambda e: sorted(e.gnodes))
        reg.buckets = {}
        og = build_overlap_graph([cover(e) for e in embs], reg.buckets)
        chosen, mode = max_independent_set(og, cfg.mis_mode, cfg.mis_threshold)
        stats["candidates"] += 1
        stats["embeddings"] += len(embs)
        stats["overlap_edges"] += len(og.adjacency)
        code = code_to_str(cand.key)
        if result_graphs is not None:
            result_graphs[code] = (embs, og)
        if len(chosen) >= cfg.min_sup:
            stats["frequent"] += 1
            stats["mis_total"] += len(chosen)
            pat = Pattern(cand.level, code, cand.key, pattern_graph(ng, list(embs[0].node_map)))
            frequent[cand.key] = FrequentPattern(pat, len(chosen), [embs[i] for i in chosen], mode, len(embs))
            frequent[cand.key].all_embeddings = embs
    return frequent, stats


def level0_patterns(tr, cfg: MiningConfig, ng: NetGraph, result_graphs: dict | None = None) -> dict:
    """Frequent single-node patterns, grouped by tagging.

    Under event overlap the embeddings of a tagging are trivially disjoint, so
    no overlap graph is built and none is recorded in ``result_graphs``.
    """
    groups: dict = defaultdict(list)
    for rec in tr.min_e0:
        groups[rec.tagging].append(rec.gnode)
    if cfg.overlap == "event":
        out = {}
        for tag, gnodes in groups.items():
            if len(gnodes) >= cfg.min_sup:
                key = ((tag, ()),)
                embs = [Embedding(frozenset([g]), (g,)) for g in sorted(gnodes)]
                pat = Pattern(0, code_to_str(key), key, pattern_graph(ng, [gnodes[0]]))
                out[key] = FrequentPattern(pat, len(embs), embs, "exact", len(embs))
                out[key].all_embeddings = embs
        return out
    cands = []
    for tag, gnodes in groups.items():
        c = Candidate(((tag, ()),), 0)
        for g in gnodes:
            c.embeddings[frozenset([g])] = Embedding(frozenset([g]), (g,))
        cands.append(c)
    frequent, _ = _filter(cands, ng, cfg, MiningRegistries(), result_graphs)
    return frequent


def level1_patterns(tr, cfg: MiningConfig, ng: NetGraph, reg: MiningRegistries | None = None,
                    coder: _Coder | None = None, result_graphs: dict | None = None) -> tuple[dict, dict]:
    """Frequent 1-edge patterns with their chosen edge embeddings."""
    reg = reg if reg is not None else MiningRegistries()
    coder = coder if coder is not None else _Coder(ng)
    cands: dict = {}
    for rec in tr.min_e1:
        s = frozenset((tr.gnode(rec.from_index), tr.gnode(rec.to_index)))
        key, order = coder(s)
        c = cands.get(key)
        if c is None:
            c = cands[key] = Candidate(key, 1)
        c.embeddings[s] = Embedding(s, order)
    reg.candidates[1] = cands
    frequent, stats = _filter(cands.values(), ng, cfg, reg, result_graphs)
    reg.frequent[1] = frequent
    pool = reg.edge_pool
    for fp in frequent.values():
        embs = fp.embeddings if cfg.extension == "paper" else fp.all_embeddings
        pool.update(e.gnodes for e in embs)
    stats["level"] = 1
    return frequent, stats


def extend_patterns(k: int, reg: MiningRegistries, cfg: MiningConfig, ng: NetGraph,
                    coder: _Coder | None = None) -> dict[int, dict]:
    """Grow every frequent level-k pattern by one node.

    Returns the new candidates grouped by level (``{level: {key: Candidate}}``)
    and merges them into ``reg.candidates``.
    """
    coder = coder if coder is not None else _Coder(ng)
    adj = ng.adj
    pool = reg.edge_pool
    fresh: dict[int, dict] = defaultdict(dict)
    for pkey, fp in sorted(reg.frequent.get(k, {}).items(), key=lambda kv: kv[1].code):
        base = fp.embeddings if cfg.extension == "paper" else fp.all_embeddings
        for idx, emb in enumerate(base):
            nodes = emb.gnodes
            for u in sorted(nodes):
                for w in adj[u]:
                    if w in nodes or frozenset((u, w)) not in pool:
                        continue
                    s = nodes | {w}
                    key, order = coder(s)
                    level = _level_of(key)
                    bucket = reg.candidates[level]
                    cand = bucket.get(key)
                    if cand is None:
                        cand = bucket[key] = Candidate(key, level)
                        fresh[level][key] = cand
                    if s not in cand.embeddings:
                        cand.embeddings[s] = Embedding(s, order)
                    cand.parent_hits[pkey].add(idx)
    return fresh


def mine(ng: NetGraph, cfg: MiningConfig) -> MiningResult:
    cfg.validate()
    if ng.kind != "e":
        raise ValueError("mining runs on e-type net graphs; mine the dual net for c-type subnets")
    # traversal order does not affect the result, so the big graph is not minimised
    tr = dfs_traversal(ng)
    noe = tr.noe
    reg = MiningRegistries()
    coder = _Coder(ng)
    graphs = {} if cfg.keep_overlap_graphs else None

    f0 = level0_patterns(tr, cfg, ng, graphs)
    reg.frequent[0] = f0
    level_stats = [{"level": 0, "candidates": len({r.tagging for r in tr.min_e0}), "frequent": len(f0)}]
    levels = [0]
    early = None
    if cfg.max_level is None or cfg.max_level >= 1:
        f1, stats = level1_patterns(tr, cfg, ng, reg, coder, graphs)
        level_stats.append(stats)
        levels.append(1)
        log.info("level 1: %d candidates, %d frequent", stats["candidates"], stats["frequent"])
        extend_patterns(1, reg, cfg, ng, coder)
        while True:
            pending = [L for L, c in reg.candidates.items() if L > levels[-1] and c]
            if not pending:
                break
            L = min(pending)
            if cfg.max_level is not None and L > cfg.max_level:
                break
            if L * cfg.min_sup > noe:
                early = {
                    "level": L,
                    "bound": noe // cfg.min_sup,
                    "dropped_candidates": sum(len(reg.candidates[j]) for j in pending),
                }
                break
            cands = [c for c in reg.candidates[L].values() if c.support_bound() >= cfg.min_sup]
            frequent, stats = _filter(cands, ng, cfg, reg, graphs)
            stats["level"] = L
            stats["generated"] = len(reg.candidates[L])
            level_stats.append(stats)
            levels.append(L)
            reg.frequent[L] = frequent
            log.info("level %d: %d candidates, %d frequent", L, stats["candidates"], stats["frequent"])
            # candidates of finished levels are not needed any more
            reg.candidates[L] = {}
            extend_patterns(L, reg, cfg, ng, coder)

    patterns = [fp for L in sorted(reg.frequent) for fp in reg.frequent[L].values()]
    patterns.sort(key=lambda p: (p.level, p.code))
    for fp in patterns:
        if hasattr(fp, "all_embeddings"):
            del fp.all_embeddings
    if early is None and cfg.max_level is None and (levels[-1] + 1) * cfg.min_sup > noe:
        # nothing was pending, but the bound would have closed the next level anyway
        early = {"level": levels[-1] + 1, "bound": noe // cfg.min_sup, "dropped_candidates": 0}
    return MiningResult(
        engine="bigcarl",
        config=asdict(cfg),
        noe=noe,
        patterns=patterns,
        levels_explored=levels,
        early_stop=early,
        level_stats=level_stats,
        overlap_graphs=graphs or {},
    )


def to_subnets(result: MiningResult, ng: NetGraph) -> list[tuple[PetriNet, list[PetriNet]]]:
    """Each frequent pattern as a Petri net plus its embeddings as real subnets."""
    out = []
    for fp in result.patterns:
        out.append((
            from_e_netgraph(fp.pattern.graph),
            [subnet_of(ng, sorted(e.gnodes)) for e in fp.embeddings],
        ))
    return out
