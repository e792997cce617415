"""Frequent subnet mining on large condition/event Petri nets."""

from .canonical import canonical_code, minimal_dfs_traversal
from .miner import MiningConfig, MiningResult, mine, to_subnets
from .mis import OverlapGraph, build_overlap_graph, max_independent_set
from .netgraph import NetGraph, check_duality, from_e_netgraph, to_c_netgraph, to_e_netgraph
from .petri import (
    NetError,
    OverlapKind,
    PetriNet,
    connect,
    dual,
    parse_cenet,
    read_cenet,
    serialize_cenet,
    write_cenet,
)

__version__ = "0.1.0"

__all__ = [
    "MiningConfig", "MiningResult", "NetError", "NetGraph", "OverlapGraph", "OverlapKind",
    "PetriNet", "build_overlap_graph", "canonical_code", "check_duality", "connect", "dual",
    "from_e_netgraph", "max_independent_set", "mine", "minimal_dfs_traversal", "parse_cenet",
    "read_cenet", "serialize_cenet", "to_c_netgraph", "to_e_netgraph", "to_subnets", "write_cenet",
]
