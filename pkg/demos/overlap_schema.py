"""Insert ten copies of a small net whose shared conditions follow a chosen graph.

The overlap graph the miner builds for the small pattern should be that graph.

    python3 demos/overlap_schema.py
"""

import random

import networkx as nx

from petrimine.generator import GeneratorParams, generate, insert_with_overlap_schema
from petrimine.miner import MiningConfig, mine
from petrimine.netgraph import to_e_netgraph
from petrimine.petri import PetriNet

m = 10
small = PetriNet({1: "IN"} | {10 + k: f"SLOT{k}" for k in range(10)}, {0: "SMALL"},
                 {(1, 0)} | {(0, 10 + k) for k in range(10)})
pairs = {(h, h + 1) for h in range(1, m)} | {(1, m)}  # a 10-cycle
big = generate(GeneratorParams(U=300, seed=3))
net, schema, copies = insert_with_overlap_schema(big, small, m, pairs, random.Random(3))

ng = to_e_netgraph(net)
res = mine(ng, MiningConfig(1, mis_mode="exact", overlap="condition", max_level=0, keep_overlap_graphs=True))
code = str(ng.tagging(copies[0][0]))
_, og = res.overlap_graphs[code]
mined = nx.Graph(list(og.adjacency))
print(f"pattern {code}: {og.n} embeddings, {len(og.adjacency)} overlap edges")
print("isomorphic to the schema:", nx.is_isomorphic(mined, nx.cycle_graph(m)))
print("MIS support:", res.by_code()[code].support, "(a 10-cycle has independence number 5)")
