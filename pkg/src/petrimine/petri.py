"""Pure condition/event nets.

A net is three plain containers: condition labels, event labels (both keyed
by integer node id) and a set of arcs.  Node ids are unique across both
roles; labels repeat freely and are what patterns are compared on.
"""

from __future__ import annotations

import enum
import random
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple


class NetError(ValueError):
    """Raised when an operation's structural precondition does not hold."""


class CenetSyntaxError(NetError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")


class OverlapKind(enum.IntEnum):
    """Which node role two nets are glued on: conditions (0) or events (1)."""

    CTYPE = 0
    ETYPE = 1

    @classmethod
    def parse(cls, text: str | int | OverlapKind) -> OverlapKind:
        if isinstance(text, OverlapKind):
            return text
        key = str(text).strip().lower()
        if key in ("c", "ctype", "c-type", "0", "cond", "condition"):
            return cls.CTYPE
        if key in ("e", "etype", "e-type", "1", "event"):
            return cls.ETYPE
        raise ValueError(f"unknown overlap kind {text!r}")


LABEL_RE = re.compile(r"[A-Za-z0-9_.]+")


@dataclass(frozen=True, eq=False)
class PetriNet:
    """Bipartite labelled net ``(C, E; F)``.

    Instances are treated as immutable; construct a new net instead of
    mutating the mappings.  Construction does not validate; see
    :func:`validate_pure` and :func:`validate_clear`.
    """

    conditions: Mapping[int, str] = field(default_factory=dict)
    events: Mapping[int, str] = field(default_factory=dict)
    arcs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "conditions", dict(self.conditions))
        object.__setattr__(self, "events", dict(self.events))
        object.__setattr__(self, "arcs", frozenset((int(a), int(b)) for a, b in self.arcs))

    def __eq__(self, other):
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (
            self.conditions == other.conditions
            and self.events == other.events
            and self.arcs == other.arcs
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"PetriNet(|C|={len(self.conditions)}, |E|={len(self.events)}, "
            f"|F|={len(self.arcs)})"
        )

    @cached_property
    def _pre(self) -> dict[int, list[int]]:
        pre: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.arcs):
            pre.setdefault(b, []).append(a)
        return pre

    @cached_property
    def _post(self) -> dict[int, list[int]]:
        post: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.arcs):
            post.setdefault(a, []).append(b)
        return post

    @property
    def nodes(self) -> set[int]:
        return set(self.conditions) | set(self.events)

    def __len__(self):
        return len(self.conditions) + len(self.events)

    def is_event(self, node: int) -> bool:
        return node in self.events

    def is_condition(self, node: int) -> bool:
        return node in self.conditions

    def label(self, node: int) -> str:
        if node in self.events:
            return self.events[node]
        return self.conditions[node]

    def preset(self, node: int) -> list[int]:
        return self._pre.get(node, [])

    def postset(self, node: int) -> list[int]:
        return self._post.get(node, [])

    def neighbors(self, node: int) -> list[int]:
        return self.preset(node) + self.postset(node)

    def max_id(self) -> int:
        return max(self.nodes, default=-1)

    def complete_subnet(self, centers: Iterable[int]) -> PetriNet:
        """The subnet spanned by ``centers`` plus every node adjacent to them.

        With event centers this is the e-type m-complete subnet cut out of the
        net; with condition centers, the c-type one.
        """
        centers = set(centers)
        keep = set(centers)
        for n in centers:
            keep.update(self.neighbors(n))
        arcs = {(a, b) for a, b in self.arcs if (a in centers or b in centers)}
        return PetriNet(
            {n: l for n, l in self.conditions.items() if n in keep},
            {n: l for n, l in self.events.items() if n in keep},
            arcs,
        )

    def relabel_ids(self, offset: int) -> tuple[PetriNet, dict[int, int]]:
        """Copy with ids renumbered compactly from ``offset`` in id order."""
        mapping = {old: offset + i for i, old in enumerate(sorted(self.nodes))}
        return self.rename(mapping), mapping

    def rename(self, mapping: Mapping[int, int]) -> PetriNet:
        return PetriNet(
            {mapping[n]: l for n, l in self.conditions.items()},
            {mapping[n]: l for n, l in self.events.items()},
            {(mapping[a], mapping[b]) for a, b in self.arcs},
        )


def union(*nets: PetriNet) -> PetriNet:
    """Disjoint union; the caller guarantees the id sets do not collide."""
    conditions, events, arcs = {}, {}, set()
    for net in nets:
        conditions.update(net.conditions)
        events.update(net.events)
        arcs |= net.arcs
    return PetriNet(conditions, events, arcs)


def validate_pure(net: PetriNet) -> list[str]:
    """Every violation of bipartiteness, purity or arc well-formedness."""
    report = []
    for n in sorted(set(net.conditions) & set(net.events)):
        report.append(f"duplicate id: {n} declared as both condition and event")
    for a, b in sorted(net.arcs):
        missing = [x for x in (a, b) if x not in net.conditions and x not in net.events]
        if missing:
            for x in missing:
                report.append(f"dangling: arc ({a},{b}) endpoint {x} unknown")
            continue
        if a in net.events and b in net.events:
            report.append(f"bipartite: event→event arc ({a},{b})")
        elif a in net.conditions and b in net.conditions:
            report.append(f"bipartite: condition→condition arc ({a},{b})")
        elif a == b:
            report.append(f"bipartite: self arc ({a},{b})")
        if a < b and (b, a) in net.arcs:
            first, second = (a, b) if a in net.conditions else (b, a)
            report.append(f"purity: ({first},{second})/({second},{first})")
    return report


def validate_clear(net: PetriNet) -> list[str]:
    """Events whose input (or output) conditions repeat a label."""
    report = []
    for e in sorted(net.events):
        for side, nodes in (("input", net.preset(e)), ("output", net.postset(e))):
            counts = Counter(net.conditions[c] for c in nodes if c in net.conditions)
            for label in sorted(l for l, k in counts.items() if k > 1):
                report.append(f"clear: event {e} duplicate {side} label {label}")
    return report


def is_pure(net: PetriNet) -> bool:
    return not validate_pure(net)


def is_clear(net: PetriNet) -> bool:
    return not validate_clear(net)


def dual(net: PetriNet) -> PetriNet:
    """Swap the roles of events and conditions; ids, labels and arcs stay."""
    return PetriNet(net.events, net.conditions, net.arcs)


def one_complete_subnet(net: PetriNet, center: int, kind: OverlapKind) -> PetriNet:
    kind = OverlapKind.parse(kind)
    if center not in net.events and center not in net.conditions:
        raise NetError(f"unknown node id {center}")
    if kind is OverlapKind.ETYPE and center not in net.events:
        raise NetError(f"e-type 1-complete subnet needs an event center, {center} is a condition")
    if kind is OverlapKind.CTYPE and center not in net.conditions:
        raise NetError(f"c-type 1-complete subnet needs a condition center, {center} is an event")
    return net.complete_subnet([center])


def is_complete_subnet(sub: PetriNet, net: PetriNet, kind: OverlapKind = OverlapKind.ETYPE) -> bool:
    """True when ``sub`` is a subnet of ``net`` closed under the centers' neighbourhoods.

    For e-type, every event of ``sub`` must carry its full pre- and postset
    from ``net`` (same ids, labels and arcs); c-type is the dual statement.
    """
    kind = OverlapKind.parse(kind)
    if any(net.conditions.get(c) != l for c, l in sub.conditions.items()):
        return False
    if any(net.events.get(e) != l for e, l in sub.events.items()):
        return False
    if not sub.arcs <= net.arcs:
        return False
    centers = sub.events if kind is OverlapKind.ETYPE else sub.conditions
    for n in centers:
        for m in net.preset(n):
            if (m, n) not in sub.arcs:
                return False
        for m in net.postset(n):
            if (n, m) not in sub.arcs:
                return False
    return True


class Connection(NamedTuple):
    """Outcome of :func:`connect`.

    ``id_map`` sends every node id of the second net to its id in ``net``;
    ``merges`` lists the identified pairs as ``(id in n1, id in n2)``.
    """

    net: PetriNet
    id_map: dict[int, int]
    merges: list[tuple[int, int]]

    @property
    def overlapped(self) -> bool:
        return bool(self.merges)


class NetBuilder:
    """Mutable accumulator that glues nets on one after another.

    :func:`connect` is a single :meth:`glue` on a fresh builder; generators
    keep one builder alive so each glue costs only the size of the piece
    being attached.
    """

    def __init__(self, net: PetriNet | None = None):
        net = net if net is not None else PetriNet()
        self.conditions: dict[int, str] = dict(net.conditions)
        self.events: dict[int, str] = dict(net.events)
        self.arcs: set[tuple[int, int]] = set(net.arcs)
        self.pre: dict[int, list[int]] = defaultdict(list)
        self.post: dict[int, list[int]] = defaultdict(list)
        for a, b in sorted(net.arcs):
            self.post[a].append(b)
            self.pre[b].append(a)
        self._by_label = {OverlapKind.CTYPE: defaultdict(list), OverlapKind.ETYPE: defaultdict(list)}
        for c in sorted(self.conditions):
            self._by_label[OverlapKind.CTYPE][self.conditions[c]].append(c)
        for e in sorted(self.events):
            self._by_label[OverlapKind.ETYPE][self.events[e]].append(e)
        self.next_id = net.max_id() + 1

    def build(self) -> PetriNet:
        return PetriNet(self.conditions, self.events, self.arcs)

    def _labels(self, nodes) -> set[str]:
        return {self.conditions[c] for c in nodes}

    def glue(
        self,
        x: OverlapKind,
        H: int,
        other: PetriNet,
        rng: random.Random,
        protected: Iterable[int] = (),
    ) -> tuple[dict[int, int], list[tuple[int, int]]]:
        x = OverlapKind.parse(x)
        if H < 1:
            raise NetError("H must be at least 1")
        copy, id_map = other.relabel_ids(self.next_id)
        left = self.conditions if x is OverlapKind.CTYPE else self.events
        right = copy.conditions if x is OverlapKind.CTYPE else copy.events
        groups = self._by_label[x]
        protected = {a for a in protected if a in left}
        prot_count = Counter(left[a] for a in protected)

        target = rng.randint(1, H)
        merged: dict[int, int] = {}
        used: set[int] = set()
        used_count: Counter = Counter()
        rejected: dict[int, set[int]] = {b: set() for b in sorted(right) if right[b] in groups}

        def weight(b: int) -> int:
            lab = right[b]
            return len(groups[lab]) - prot_count[lab] - used_count[lab] - len(rejected[b])

        while len(merged) < target:
            live = [(b, weight(b)) for b in rejected if b not in merged]
            live = [(b, w) for b, w in live if w > 0]
            total = sum(w for _, w in live)
            if total == 0:
                break
            r = rng.randrange(total)
            for b, w in live:
                if r < w:
                    break
                r -= w
            group = groups[right[b]]
            bad = rejected[b]
            if w * 8 < len(group):
                pool = [a for a in group if a not in protected and a not in used and a not in bad]
                a = pool[rng.randrange(len(pool))]
            else:
                while True:
                    a = group[rng.randrange(len(group))]
                    if a not in protected and a not in used and a not in bad:
                        break
            if x is OverlapKind.ETYPE and (
                self._labels(self.pre[a]) & {copy.conditions[c] for c in copy.preset(b)}
                or self._labels(self.post[a]) & {copy.conditions[c] for c in copy.postset(b)}
            ):
                bad.add(a)
                continue
            merged[b] = a
            used.add(a)
            used_count[left[a]] += 1
            for s in rejected.values():
                s.discard(a)

        sub = lambda n: merged.get(n, n)  # noqa: E731
        for c in sorted(copy.conditions):
            if c not in merged:
                self.conditions[c] = copy.conditions[c]
                self._by_label[OverlapKind.CTYPE][copy.conditions[c]].append(c)
        for e in sorted(copy.events):
            if e not in merged:
                self.events[e] = copy.events[e]
                self._by_label[OverlapKind.ETYPE][copy.events[e]].append(e)
        for a, b in sorted(copy.arcs):
            arc = (sub(a), sub(b))
            self.arcs.add(arc)
            self.post[arc[0]].append(arc[1])
            self.pre[arc[1]].append(arc[0])
        self.next_id = max(self.next_id, copy.max_id() + 1)

        inverse = {new: old for old, new in id_map.items()}
        final_map = {old: sub(new) for old, new in id_map.items()}
        merges = sorted((a, inverse[b]) for b, a in merged.items())
        return final_map, merges


def connect(
    x: OverlapKind,
    H: int,
    n1: PetriNet,
    n2: PetriNet,
    rng: random.Random,
    *,
    protected: Iterable[int] = (),
) -> Connection:
    """Glue a fresh-id copy of ``n2`` onto ``n1`` at up to ``H`` node pairs.

    The number of merges is drawn uniformly from ``[1, H]``; each merge picks
    uniformly among the eligible ``(n1 node, n2 node)`` pairs of role ``x``
    that share a label.  A node takes part in at most one merge, nodes of
    ``n1`` listed in ``protected`` never do, and event merges that would
    repeat a label in the merged pre- or postset are skipped.  When nothing
    is eligible the result is the disjoint union.
    """
    builder = NetBuilder(n1)
    id_map, merges = builder.glue(x, H, n2, rng, protected)
    return Connection(builder.build(), id_map, merges)


def parse_cenet(text: str | bytes) -> PetriNet:
    """Read the line-based ``.cenet`` format.

    ``event <id> <label>``, ``cond <id> <label>``, ``arc <src> <dst>``;
    ``#`` comments and blank lines are skipped.  Arcs may refer to nodes
    declared further down.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    conditions: dict[int, str] = {}
    events: dict[int, str] = {}
    arcs: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind in ("event", "cond"):
            if len(parts) != 3:
                raise CenetSyntaxError(f"expected '{kind} <id> <label>'", lineno)
            nid = _parse_id(parts[1], lineno)
            label = parts[2]
            if not LABEL_RE.fullmatch(label):
                raise CenetSyntaxError(f"invalid label {label!r}", lineno)
            if nid in conditions or nid in events:
                raise CenetSyntaxError(f"duplicate node id {nid}", lineno)
            (events if kind == "event" else conditions)[nid] = label
        elif kind == "arc":
            if len(parts) != 3:
                raise CenetSyntaxError("expected 'arc <src-id> <dst-id>'", lineno)
            arcs.append((_parse_id(parts[1], lineno), _parse_id(parts[2], lineno), lineno))
        else:
            raise CenetSyntaxError(f"unknown directive {kind!r}", lineno)
    for a, b, lineno in arcs:
        for x in (a, b):
            if x not in conditions and x not in events:
                raise CenetSyntaxError(f"unknown node id {x}", lineno)
    return PetriNet(conditions, events, {(a, b) for a, b, _ in arcs})


def _parse_id(token: str, lineno: int) -> int:
    if not token.isdigit():
        raise CenetSyntaxError(f"invalid node id {token!r}", lineno)
    return int(token)


def serialize_cenet(net: PetriNet) -> str:
    lines = []
    for n in sorted(net.nodes):
        if n in net.events:
            lines.append(f"event {n} {net.events[n]}")
        else:
            lines.append(f"cond {n} {net.conditions[n]}")
    lines.extend(f"arc {a} {b}" for a, b in sorted(net.arcs))
    return "\n".join(lines) + ("\n" if lines else "")


def read_cenet(path) -> PetriNet:
    with open(path, "rb") as fh:
        return parse_cenet(fh.read())


def write_cenet(net: PetriNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_cenet(net))
