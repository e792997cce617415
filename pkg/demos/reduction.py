"""Arcs of the net (AB) against edges of its e-type net graph (AE) as nets grow.

    python3 demos/reduction.py
"""

from petrimine.cli import net_stats
from petrimine.generator import GeneratorParams, generate
from petrimine.petri import OverlapKind

for H in (1, 2, 3):
    for U in (1000, 4000, 16000):
        s = net_stats(generate(GeneratorParams(x=OverlapKind.CTYPE, U=U, H=H, seed=0)))
        print(f"H={H} U={U:>6}: AB={s['arcs']:>6} AE={s['ng_edges']:>6} AE/AB={s['ratio']:.3f}")
