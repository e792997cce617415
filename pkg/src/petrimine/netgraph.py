"""Net graphs: pseudo-graphs over one node role of a C/E net.

In the e-type graph every event becomes a node tagged with its signed
conditions, and two events are joined by one edge whose tagging lists a
``(h1, label, h2)`` triple for every condition they share.  The c-type graph
is the same construction with the roles exchanged.

Signs are stored as ints, ``0`` for ``-`` (the neighbour is in the node's
preset) and ``1`` for ``+`` (postset), so plain tuple comparison already
gives the ``-`` before ``+`` order used for sorting and canonical codes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple

from networkx.utils import UnionFind

from .petri import NetError, PetriNet, dual, validate_clear

MINUS, PLUS = 0, 1
SIGN_CHAR = "-+"


class NotClearError(NetError):
    pass


class NodeTagging(NamedTuple):
    label: str
    signed: tuple  # ((sign, neighbour label), ...) sorted

    def __str__(self):
        return self.label + "<" + "".join(SIGN_CHAR[s] + l for s, l in self.signed) + ">"


class EdgeTagging(NamedTuple):
    triples: tuple  # ((h1, label, h2), ...) sorted

    def __str__(self):
        return "[" + ",".join(SIGN_CHAR[a] + l + SIGN_CHAR[b] for a, l, b in self.triples) + "]"

    def reversed(self) -> EdgeTagging:
        return EdgeTagging(tuple(sorted((b, l, a) for a, l, b in self.triples)))


_NODE_TAG_RE = re.compile(r"([A-Za-z0-9_.]+)<((?:[-+][A-Za-z0-9_.]+)*)>")
_SIGNED_RE = re.compile(r"([-+])([A-Za-z0-9_.]+)")
_TRIPLE_RE = re.compile(r"([-+])([A-Za-z0-9_.]+)([-+])")


def parse_node_tagging(text: str) -> NodeTagging:
    m = _NODE_TAG_RE.fullmatch(text)
    if not m:
        raise ValueError(f"malformed node tagging {text!r}")
    signed = tuple((SIGN_CHAR.index(s), l) for s, l in _SIGNED_RE.findall(m.group(2)))
    return NodeTagging(m.group(1), signed)


def parse_edge_tagging(text: str) -> EdgeTagging:
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"malformed edge tagging {text!r}")
    body = text[1:-1]
    triples = []
    for part in body.split(",") if body else []:
        m = _TRIPLE_RE.fullmatch(part)
        if not m:
            raise ValueError(f"malformed edge triple {part!r}")
        triples.append((SIGN_CHAR.index(m.group(1)), m.group(2), SIGN_CHAR.index(m.group(3))))
    return EdgeTagging(tuple(triples))


@dataclass(frozen=True, eq=False)
class NetGraph:
    """Tagged pseudo-graph.

    ``nodes`` maps a graph node id to ``(source node id, tagging)``.
    ``edges`` is keyed by ``(u, v)`` where ``u`` has the smaller
    ``(tagging, gid)`` key, and the stored tagging reads from ``u`` to ``v``.
    ``backmap`` resolves each ``(gid, sign, label)`` tagging slot to the id of
    the source node it came from.  ``kind`` is ``"e"`` or ``"c"``.
    """

    kind: str = "e"
    nodes: Mapping[int, tuple] = field(default_factory=dict)
    edges: Mapping[tuple, EdgeTagging] = field(default_factory=dict)
    backmap: Mapping[tuple, int] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, NetGraph):
            return NotImplemented
        return (
            self.kind == other.kind
            and dict(self.nodes) == dict(other.nodes)
            and dict(self.edges) == dict(other.edges)
            and dict(self.backmap) == dict(other.backmap)
        )

    __hash__ = None

    def __repr__(self):
        return f"NetGraph(kind={self.kind!r}, |V|={len(self.nodes)}, |W|={len(self.edges)})"

    def tagging(self, g: int) -> NodeTagging:
        return self.nodes[g][1]

    def source(self, g: int) -> int:
        return self.nodes[g][0]

    @cached_property
    def tags(self) -> dict[int, NodeTagging]:
        return {g: t for g, (_, t) in self.nodes.items()}

    @cached_property
    def adj(self) -> dict[int, dict[int, EdgeTagging]]:
        """Neighbour map with every tagging oriented away from the key node."""
        adj: dict[int, dict[int, EdgeTagging]] = {g: {} for g in self.nodes}
        for (u, v), t in self.edges.items():
            adj[u][v] = t
            adj[v][u] = t.reversed()
        return adj

    @cached_property
    def slot_sources(self) -> dict[int, list[int]]:
        """Source ids of the tagging slots of each node (its adjacent conditions, for e-type)."""
        out: dict[int, list[int]] = {g: [] for g in self.nodes}
        for (g, _, _), src in self.backmap.items():
            out[g].append(src)
        for g in out:
            out[g].sort()
        return out

    def edge_tagging(self, u: int, v: int) -> EdgeTagging:
        return self.adj[u][v]

    def induced(self, gids: Iterable[int]) -> NetGraph:
        keep = set(gids)
        return NetGraph(
            self.kind,
            {g: self.nodes[g] for g in sorted(keep)},
            {k: t for k, t in self.edges.items() if k[0] in keep and k[1] in keep},
            {k: s for k, s in self.backmap.items() if k[0] in keep},
        )


def _orient(tags: Mapping[int, NodeTagging], u: int, v: int) -> bool:
    """True when ``u`` should be stored first on edge ``{u, v}``."""
    return (tags[u], u) < (tags[v], v)


def _build(net: PetriNet, kind: str) -> NetGraph:
    if kind == "e":
        centers, others = net.events, net.conditions
    else:
        centers, others = net.conditions, net.events
    nodes = {}
    backmap = {}
    sign_of: dict[tuple[int, int], int] = {}
    for g in sorted(centers):
        slots = []
        for sign, side in ((MINUS, net.preset(g)), (PLUS, net.postset(g))):
            for x in side:
                if x not in others:
                    raise NetError(f"arc ({x},{g}) is not bipartite")
                key = (g, sign, others[x])
                if key in backmap:
                    role = "event" if kind == "e" else "condition"
                    raise NotClearError(
                        f"{role} {g} has two {'input' if sign == MINUS else 'output'} "
                        f"neighbours labelled {others[x]}"
                    )
                if (g, x) in sign_of:
                    raise NetError(f"net is not pure at ({g},{x})")
                backmap[key] = x
                sign_of[(g, x)] = sign
                slots.append((sign, others[x]))
        nodes[g] = (g, NodeTagging(centers[g], tuple(sorted(slots))))

    tags = {g: t for g, (_, t) in nodes.items()}
    triples: dict[tuple[int, int], list] = {}
    for x in sorted(others):
        around = sorted(set(net.preset(x)) | set(net.postset(x)))
        for u, v in combinations(around, 2):
            if not _orient(tags, u, v):
                u, v = v, u
            triples.setdefault((u, v), []).append((sign_of[(u, x)], others[x], sign_of[(v, x)]))
    edges = {}
    for key in sorted(triples):
        ts = sorted(triples[key])
        assert len(set(ts)) == len(ts), "repeated edge triple in a clear net"
        edges[key] = EdgeTagging(tuple(ts))
    return NetGraph(kind, nodes, edges, backmap)


def to_e_netgraph(net: PetriNet) -> NetGraph:
    """One node per event, one edge per event pair sharing a condition."""
    return _build(net, "e")


def to_c_netgraph(net: PetriNet) -> NetGraph:
    """One node per condition, one edge per condition pair sharing an event.

    A condition ``c`` is tagged with ``-e`` for every producer ``e`` (arc
    ``e -> c``) and ``+e`` for every consumer (arc ``c -> e``).
    """
    return _build(net, "c")


def _as_kind(ng: NetGraph, kind: str) -> NetGraph:
    return NetGraph(kind, ng.nodes, ng.edges, ng.backmap)


def check_duality(net: PetriNet) -> bool:
    """Whether the e-type graph of ``net`` equals the renamed c-type graph of its dual.

    Both ``net`` and its dual must be clear; otherwise :class:`NotClearError`
    is raised rather than returning ``False``.
    """
    d = dual(net)
    problems = validate_clear(d)
    if problems:
        raise NotClearError("dual net is not clear: " + problems[0])
    direct = to_e_netgraph(net)
    via_dual = to_c_netgraph(d)
    return direct == _as_kind(via_dual, "e")


def from_e_netgraph(ng: NetGraph) -> PetriNet:
    """Rebuild a net from an e-type net graph.

    Every ``(node, sign, label)`` slot is a condition occurrence; slots joined
    by an edge triple are the same condition.  Events keep their graph ids,
    conditions get fresh ids above them in slot order.
    """
    slots = [(g, s, l) for g in sorted(ng.nodes) for s, l in ng.tagging(g).signed]
    slot_set = set(slots)
    uf = UnionFind(slots)
    for (u, v), t in sorted(ng.edges.items()):
        for h1, label, h2 in t.triples:
            a, b = (u, h1, label), (v, h2, label)
            for s in (a, b):
                if s not in slot_set:
                    raise NetError(f"edge ({u},{v}) triple {label} has no slot {s} in the node taggings")
            uf.union(a, b)
    classes: dict = {}
    for s in slots:
        classes.setdefault(uf[s], []).append(s)
    events = {g: ng.tagging(g).label for g in ng.nodes}
    next_id = max(ng.nodes, default=-1) + 1
    conditions = {}
    arcs = set()
    for members in sorted(classes.values(), key=min):
        seen = {}
        for g, s, l in members:
            if g in seen:
                raise NetError(f"sign conflict: condition {l} meets node {g} with both signs")
            seen[g] = s
        cid = next_id
        next_id += 1
        conditions[cid] = members[0][2]
        for g, s in seen.items():
            arcs.add((cid, g) if s == MINUS else (g, cid))
    return PetriNet(conditions, events, arcs)


def subnet_of(ng: NetGraph, gids: Iterable[int]) -> PetriNet:
    """Materialise the e-type complete subnet of ``gids`` with real source ids."""
    conditions, events, arcs = {}, {}, set()
    for g in gids:
        src, tag = ng.nodes[g]
        events[src] = tag.label
        for s, l in tag.signed:
            c = ng.backmap[(g, s, l)]
            conditions[c] = l
            arcs.add((c, src) if s == MINUS else (src, c))
    return PetriNet(conditions, events, arcs)


def serialize_ngraph(ng: NetGraph) -> str:
    lines = [f"node {g} {ng.tagging(g)}" for g in sorted(ng.nodes)]
    for u, v in sorted((min(k), max(k)) for k in ng.edges):
        lines.append(f"edge {u} {v} {ng.edge_tagging(u, v)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ngraph(text: str, kind: str = "e") -> NetGraph:
    """Read the ``.ngraph`` debug format (no backmap is stored there)."""
    nodes, raw_edges = {}, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "node":
                g = int(parts[1])
                nodes[g] = (g, parse_node_tagging(parts[2]))
            elif parts[0] == "edge":
                raw_edges.append((int(parts[1]), int(parts[2]), parse_edge_tagging(parts[3])))
            else:
                raise ValueError(f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{exc} at line {lineno}") from None
    tags = {g: t for g, (_, t) in nodes.items()}
    edges = {}
    for u, v, t in raw_edges:
        if _orient(tags, u, v):
            edges[(u, v)] = t
        else:
            edges[(v, u)] = t.reversed()
    return NetGraph(kind, nodes, edges, {})
