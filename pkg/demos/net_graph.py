"""Build a small C/E net, look at its e-type net graph and canonical code.

    python3 demos/net_graph.py
"""

from petrimine import parse_cenet
from petrimine.canonical import minimal_dfs_traversal
from petrimine.netgraph import from_e_netgraph, serialize_ngraph, to_c_netgraph, to_e_netgraph

NET = """\
event 1 A
event 2 B
event 3 C
cond 10 P
cond 11 Q
cond 12 R
cond 13 R
arc 10 1
arc 1 11
arc 11 2
arc 11 3
arc 2 12
arc 3 13
"""

net = parse_cenet(NET)
ng = to_e_netgraph(net)
print("e-type net graph:")
print(serialize_ngraph(ng), end="")
print("c-type net graph:")
print(serialize_ngraph(to_c_netgraph(net)), end="")

tr = minimal_dfs_traversal(ng)
print(f"minimal DFS code: {tr}  (NoE={tr.noe})")

back = from_e_netgraph(ng)
print(f"rebuilt net: {len(back.events)} events, {len(back.conditions)} conditions, {len(back.arcs)} arcs")
