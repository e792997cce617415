"""Plant copies of small nets in a generated net, mine, and check recovery.

    python3 demos/planted.py
"""

import json
import random

from petrimine.cli import check_result
from petrimine.generator import GeneratorParams, PlantSpec, plant, planting_net
from petrimine.miner import MiningConfig, mine
from petrimine.netgraph import to_e_netgraph

rng = random.Random(1)
params = GeneratorParams(U=400, event_alphabet_size=10, cond_alphabet_size=20, seed=1)
nets = [planting_net(rng, params, rng.randint(1, 3)) for _ in range(3)]
net, truth = plant(PlantSpec(nets, g=3, H=2, min_sup=3, copy_bound=6), params, rng)
print(f"net: {len(net.events)} events, {len(net.arcs)} arcs; {len(truth.patterns)} planted patterns")
for p in truth.patterns:
    print(f"  {p.code}: {len(p.occurrences)} copies, {p.disjoint_intact} disjoint intact")

ng = to_e_netgraph(net)
res = mine(ng, MiningConfig(3))
for code, ok, detail in check_result(net, truth, json.loads(res.to_json(ng))):
    print(f"{'PASS' if ok else 'FAIL'} {code} ({detail})")
