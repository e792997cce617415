"""Seeded random nets, planted patterns and predefined overlap schemas.

Everything takes an explicit ``random.Random`` (or a seed) so that a run is
reproduced exactly by its parameters.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from .canonical import canonical_code, code_to_str, min_code, restrict
from .mis import OverlapGraph
from .netgraph import to_e_netgraph
from .petri import (
    NetBuilder,
    NetError,
    OverlapKind,
    PetriNet,
    is_clear,
    union,
    validate_clear,
    validate_pure,
)

TRUTH_SCHEMA = "petrimine.truth/1"


@dataclass(frozen=True)
class GeneratorParams:
    x: OverlapKind = OverlapKind.CTYPE
    U: int = 100
    H: int = 3
    cond_in_range: tuple = (1, 3)
    cond_out_range: tuple = (1, 3)
    event_alphabet_size: int = 20
    cond_alphabet_size: int = 40
    seed: int = 0

    def validate(self) -> None:
        if self.U < 1 or self.H < 1:
            raise ValueError("U and H must be at least 1")
        for name in ("cond_in_range", "cond_out_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or lo > hi:
                raise ValueError(f"{name} must be a non-empty range of non-negative counts")
            if hi > self.cond_alphabet_size:
                raise ValueError(
                    f"{name} upper bound {hi} exceeds the condition alphabet ({self.cond_alphabet_size});"
                    " labels are drawn without replacement"
                )
        if self.event_alphabet_size < 1 or self.cond_alphabet_size < 1:
            raise ValueError("alphabet sizes must be at least 1")

    def replace(self, **changes) -> GeneratorParams:
        return GeneratorParams(**{**asdict(self), **changes})


def event_alphabet(params: GeneratorParams) -> list[str]:
    return [f"E{i}" for i in range(params.event_alphabet_size)]


def cond_alphabet(params: GeneratorParams) -> list[str]:
    return [f"P{i}" for i in range(params.cond_alphabet_size)]


def basic_net(rng: random.Random, params: GeneratorParams) -> PetriNet:
    """One event with its own input and output conditions."""
    params.validate()
    conds = cond_alphabet(params)
    n_in = rng.randint(*params.cond_in_range)
    n_out = rng.randint(*params.cond_out_range)
    label = event_alphabet(params)[rng.randrange(params.event_alphabet_size)]
    conditions, arcs = {}, set()
    nid = 1
    for lab in rng.sample(conds, n_in):
        conditions[nid] = lab
        arcs.add((nid, 0))
        nid += 1
    for lab in rng.sample(conds, n_out):
        conditions[nid] = lab
        arcs.add((0, nid))
        nid += 1
    return PetriNet(conditions, {0: label}, arcs)


def generate(params: GeneratorParams) -> PetriNet:
    """Start from a basic net and glue ``U`` further basic nets onto it."""
    params.validate()
    rng = random.Random(params.seed)
    builder = NetBuilder(basic_net(rng, params))
    for _ in range(params.U):
        builder.glue(params.x, params.H, basic_net(rng, params), rng)
    return builder.build()


def generate_until_arcs(params: GeneratorParams, arcs: int) -> PetriNet:
    """Keep gluing basic nets until the net has at least ``arcs`` arcs (``params.U`` is ignored)."""
    params.validate()
    rng = random.Random(params.seed)
    builder = NetBuilder(basic_net(rng, params))
    while len(builder.arcs) < arcs:
        builder.glue(params.x, params.H, basic_net(rng, params), rng)
    return builder.build()


def planting_net(rng: random.Random, params: GeneratorParams, n_events: int, attempts: int = 200) -> PetriNet:
    """A connected clear net of ``n_events`` events built from condition-glued basic nets."""
    if n_events < 1:
        raise ValueError("a planting net needs at least one event")
    builder = NetBuilder(basic_net(rng, params))
    while len(builder.events) < n_events:
        for _ in range(attempts):
            piece = basic_net(rng, params)
            labels = set(piece.conditions.values())
            if labels & {builder.conditions[c] for c in builder.conditions}:
                break
        else:
            raise NetError("could not grow a connected planting net; enlarge the ranges or shrink the alphabet")
        _, merges = builder.glue(OverlapKind.CTYPE, params.H, piece, rng)
        assert merges, "a shared condition label always yields a merge"
    return builder.build()


@dataclass
class PlantSpec:
    planting_nets: list
    g: int = 4
    H: int = 2
    min_sup: int = 2
    copy_bound: int = 5
    copies: list = field(default_factory=list)  # (c(s), e(s)) per planting net once drawn

    def validate(self) -> None:
        if self.min_sup < 1:
            raise ValueError("min_sup must be a positive integer")
        if self.copy_bound <= self.min_sup:
            raise ValueError("copy_bound must exceed min_sup so that min_sup < c(s) <= copy_bound")
        for i, s in enumerate(self.planting_nets):
            if len(s.events) > self.g:
                raise ValueError(f"planting net {i} has {len(s.events)} events, more than g={self.g}")
            if not is_clear(s):
                raise ValueError(f"planting net {i} is not clear")
            if len(canonical_code_components(s)) != 1:
                raise ValueError(f"planting net {i} is not connected")


def canonical_code_components(net: PetriNet) -> list[str]:
    ng = to_e_netgraph(net)
    key, _, _ = min_code(ng.tags, ng.adj)
    return code_to_str(key).split("|") if key else []


@dataclass
class PlantedOccurrence:
    kind: str  # "c" or "e": how the copy was attached
    events: list
    intact: bool  # induced complete subnet still has the planting net's form


@dataclass
class PlantedPattern:
    index: int
    code: str
    expected_support: int
    copies: tuple
    occurrences: list

    @property
    def disjoint_intact(self) -> int:
        seen, count = set(), 0
        for o in self.occurrences:
            if o.intact and not seen & set(o.events):
                seen |= set(o.events)
                count += 1
        return count


@dataclass
class GroundTruth:
    min_sup: int
    patterns: list

    def to_json(self) -> str:
        doc = {
            "schema": TRUTH_SCHEMA,
            "min_sup": self.min_sup,
            "patterns": [
                {
                    "index": p.index,
                    "code": p.code,
                    "expected_support": p.expected_support,
                    "copies": {"c": p.copies[0], "e": p.copies[1]},
                    "occurrences": [asdict(o) for o in p.occurrences],
                }
                for p in self.patterns
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> GroundTruth:
        doc = json.loads(text)
        if doc.get("schema") != TRUTH_SCHEMA:
            raise ValueError("not a ground-truth document")
        pats = [
            PlantedPattern(
                p["index"], p["code"], p["expected_support"], (p["copies"]["c"], p["copies"]["e"]),
                [PlantedOccurrence(**o) for o in p["occurrences"]],
            )
            for p in doc["patterns"]
        ]
        return cls(doc["min_sup"], pats)


def _induced_code(net_ng, events) -> str:
    key, _, _ = min_code(net_ng.tags, restrict(net_ng.adj, events))
    return code_to_str(key)


def plant(spec: PlantSpec, base_params: GeneratorParams, rng: random.Random) -> tuple[PetriNet, GroundTruth]:
    """Generate a base net and glue shuffled c- and e-attached copies of each planting net onto it.

    Events of copies that are still intact are protected from later event
    merges, so every condition-attached copy keeps its form and the copies
    stay pairwise event-disjoint.  That gives each planting net more than
    ``min_sup`` disjoint occurrences by construction; the final audit
    re-checks every recorded occurrence against the finished net.
    """
    spec.validate()
    base = generate(base_params)
    codes = []
    queue = []
    spec.copies = []
    for i, s in enumerate(spec.planting_nets):
        codes.append(canonical_code(to_e_netgraph(s)))
        c = rng.randint(spec.min_sup + 1, spec.copy_bound)
        e = rng.randint(spec.min_sup + 1, spec.copy_bound)
        spec.copies.append((c, e))
        queue += [(i, OverlapKind.CTYPE)] * c + [(i, OverlapKind.ETYPE)] * e
    rng.shuffle(queue)

    builder = NetBuilder(base)
    protected: set[int] = set()
    placed: list[list] = [[] for _ in spec.planting_nets]
    for i, x in queue:
        s = spec.planting_nets[i]
        id_map, merges = builder.glue(x, spec.H, s, rng, protected)
        events = sorted(id_map[e] for e in s.events)
        placed[i].append((x, events, bool(merges) and x is OverlapKind.ETYPE))
        if not (merges and x is OverlapKind.ETYPE):
            protected.update(events)
    net = builder.build()

    problems = validate_pure(net) + validate_clear(net)
    if problems:
        raise NetError("planting produced an invalid net: " + "; ".join(problems[:3]))
    ng = to_e_netgraph(net)
    truth = []
    for i, s in enumerate(spec.planting_nets):
        occ = [
            PlantedOccurrence("c" if x is OverlapKind.CTYPE else "e", events, _induced_code(ng, events) == codes[i])
            for x, events, _ in placed[i]
        ]
        pp = PlantedPattern(i, codes[i], spec.min_sup, spec.copies[i], occ)
        if pp.disjoint_intact < spec.min_sup:
            raise NetError(f"planting net {i} kept only {pp.disjoint_intact} disjoint intact copies")
        truth.append(pp)
    return net, GroundTruth(spec.min_sup, truth)


def _pendant_slots(small: PetriNet) -> list[int]:
    """Conditions with a single neighbour and a label used once in ``small``."""
    counts: dict[str, int] = {}
    for lab in small.conditions.values():
        counts[lab] = counts.get(lab, 0) + 1
    return sorted(
        c for c, lab in small.conditions.items()
        if counts[lab] == 1 and len(small.neighbors(c)) == 1
    )


def _edge_colouring(m: int, pairs: list, colours: int, rng: random.Random, attempts: int = 200):
    for _ in range(attempts):
        order = list(pairs)
        rng.shuffle(order)
        used = [set() for _ in range(m)]
        assignment = {}
        for h, j in order:
            free = [c for c in range(colours) if c not in used[h] and c not in used[j]]
            if not free:
                break
            c = free[0]
            used[h].add(c)
            used[j].add(c)
            assignment[(h, j)] = c
        else:
            return assignment
    return None


def insert_with_overlap_schema(
    big: PetriNet,
    small: PetriNet,
    m: int,
    pairs,
    rng: random.Random,
) -> tuple[PetriNet, OverlapGraph, list[list[int]]]:
    """Add ``m`` copies of ``small`` to ``big`` sharing conditions exactly along ``pairs``.

    ``pairs`` uses copy numbers ``1..m``.  Every pair is realised by fusing
    one pendant, uniquely labelled condition of the two copies; a copy uses
    each such slot for at most one pair so no unlisted pair ever meets.
    Returns the net, the expected overlap graph over copies ``0..m-1`` and
    the event ids of each copy.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if len(small.nodes) < m:
        raise ValueError(f"the small net needs at least m={m} nodes")
    norm = set()
    for h, j in pairs:
        if not (1 <= h <= m and 1 <= j <= m) or h == j:
            raise ValueError(f"bad pair ({h},{j}) for m={m}")
        norm.add((min(h, j) - 1, max(h, j) - 1))
    clash = set(small.events.values()) & set(big.events.values())
    if clash:
        raise NetError(f"event labels {sorted(clash)} of the small net also occur in the big net")
    slots = _pendant_slots(small)
    colouring = _edge_colouring(m, sorted(norm), len(slots), rng) if norm else {}
    if colouring is None:
        raise NetError(
            f"schema needs more than the {len(slots)} pendant uniquely labelled conditions of the small net"
        )

    copy_nets = []
    copies = []
    slot_ids: list[list[int]] = []
    next_id = big.max_id() + 1
    for _ in range(m):
        copy, id_map = small.relabel_ids(next_id)
        next_id = copy.max_id() + 1
        copy_nets.append(copy)
        copies.append(sorted(id_map[e] for e in small.events))
        slot_ids.append([id_map[c] for c in slots])
    joined = union(big, *copy_nets)
    fuse = {slot_ids[j][k]: slot_ids[h][k] for (h, j), k in colouring.items()}
    net = PetriNet(
        {c: lab for c, lab in joined.conditions.items() if c not in fuse},
        dict(joined.events),
        {(fuse.get(a, a), fuse.get(b, b)) for a, b in joined.arcs},
    )
    problems = validate_pure(net) + validate_clear(net)
    if problems:
        raise NetError("schema insertion produced an invalid net: " + "; ".join(problems[:3]))
    return net, OverlapGraph(m, norm), copies
