"""Mine a generated net with both engines and compare what they find.

    python3 demos/mine_small.py
"""

import time

from petrimine.baseline import mine_naive
from petrimine.generator import GeneratorParams, generate
from petrimine.miner import MiningConfig, mine
from petrimine.netgraph import to_e_netgraph

params = GeneratorParams(U=20, H=2, event_alphabet_size=2, cond_alphabet_size=3,
                         cond_in_range=(1, 2), cond_out_range=(1, 2), seed=7)
net = generate(params)
print(f"net: {len(net.events)} events, {len(net.conditions)} conditions, {len(net.arcs)} arcs")

ng = to_e_netgraph(net)
t = time.perf_counter()
res = mine(ng, MiningConfig(2, mis_mode="exact", extension="complete"))
print(f"bigcarl: {len(res.patterns)} patterns in {time.perf_counter() - t:.3f}s, levels {res.levels_explored}")
if res.early_stop:
    print(f"  next level {res.early_stop['level']} closed: at most {res.early_stop['bound']} levels fit in NoE={res.noe}")
for fp in res.patterns:
    print(f"  L{fp.level} support {fp.support}: {fp.code}")

t = time.perf_counter()
naive = mine_naive(net, 2, 4)
print(f"digcarl (up to 4 events): {len(naive.patterns)} patterns in {time.perf_counter() - t:.3f}s")
print("agree:", naive.supports() == res.supports(4))
