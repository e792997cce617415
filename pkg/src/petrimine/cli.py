"""Command-line entry point: ``petrimine {gen,mine,stats,check,bench,ngraph}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Every invocation writes one JSON run manifest line, to ``--manifest`` when
given and to stderr otherwise.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import multiprocessing
import os
import random
import resource
import sys
import time
from pathlib import Path

from . import __version__
from .baseline import OracleScaleError, mine_naive
from .generator import GeneratorParams, GroundTruth, PlantSpec, generate, generate_until_arcs, plant, planting_net
from .miner import MiningConfig, mine, read_result
from .netgraph import NotClearError, serialize_ngraph, to_c_netgraph, to_e_netgraph
from .petri import NetError, OverlapKind, read_cenet, validate_clear, validate_pure, write_cenet

log = logging.getLogger("petrimine")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    try:
        a, b = int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return a, b


def _mis(text: str) -> tuple[str, int]:
    try:
        return MiningConfig.parse_mis(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _peak_kb() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def _load_net(path):
    net = read_cenet(path)
    problems = validate_pure(net) + validate_clear(net)
    if problems:
        raise NetError(f"{path}: " + "; ".join(problems[:5]))
    return net


def _census(net) -> str:
    return f"events={len(net.events)} conditions={len(net.conditions)} arcs={len(net.arcs)}"


# -- gen ---------------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.events is None:
        raise UsageError("gen: --events is required")
    params = GeneratorParams(
        x=OverlapKind.parse(args.overlap),
        U=args.events,
        H=args.max_arcs,
        cond_in_range=args.in_range,
        cond_out_range=args.out_range,
        event_alphabet_size=args.event_labels,
        cond_alphabet_size=args.cond_labels,
        seed=args.seed,
    )
    params.validate()
    out = Path(args.output)
    if not args.plant and not args.plant_random:
        net = generate(params)
        write_cenet(net, out)
        print(f"wrote {out}: {_census(net)}")
        return EXIT_OK
    if args.min_sup is None:
        raise UsageError("gen: planting needs --min-sup")
    rng = random.Random(args.seed)
    nets = [_load_net(p) for p in args.plant]
    for _ in range(args.plant_random):
        nets.append(planting_net(rng, params, rng.randint(1, args.plant_events)))
    spec = PlantSpec(
        nets,
        g=args.plant_events,
        H=args.plant_arcs,
        min_sup=args.min_sup,
        copy_bound=args.copy_bound if args.copy_bound is not None else args.min_sup + 3,
    )
    net, truth = plant(spec, params, rng)
    write_cenet(net, out)
    truth_path = out.with_suffix(".truth")
    truth_path.write_text(truth.to_json(), encoding="utf-8")
    print(f"wrote {out}: {_census(net)}")
    print(f"wrote {truth_path}: {len(truth.patterns)} planted patterns")
    return EXIT_OK


# -- mine --------------------------------------------------------------------

def cmd_mine(args) -> int:
    net = _load_net(args.input)
    if args.engine == "digcarl":
        result = mine_naive(net, args.min_sup, args.max_events, args.max_occurrences)
    else:
        mode, threshold = args.mis
        cfg = MiningConfig(
            args.min_sup, mode, threshold, args.extension, args.overlap, args.max_level,
        )
        result = mine(to_e_netgraph(net), cfg)
    ng = to_e_netgraph(net)
    text = result.to_json(ng)
    if args.output:
        _atomic_write(Path(args.output), text)
    counts: dict[int, int] = {}
    for p in result.patterns:
        counts[p.level] = counts.get(p.level, 0) + 1
    print(f"engine={result.engine} NoE={result.noe} patterns={len(result.patterns)}")
    for level in sorted(counts):
        print(f"  level {level}: {counts[level]} frequent")
    if result.early_stop:
        print(f"  stopped before level {result.early_stop['level']} (bound {result.early_stop['bound']})")
    return EXIT_OK


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# -- stats -------------------------------------------------------------------

def net_stats(net) -> dict:
    ng = to_e_netgraph(net)
    arcs = len(net.arcs)
    return {
        "nodes": len(net.nodes),
        "arcs": arcs,
        "ng_edges": len(ng.edges),
        "ratio": len(ng.edges) / arcs if arcs else 0.0,
    }


def cmd_stats(args) -> int:
    rows = []
    for path in args.inputs:
        net = _load_net(path)
        row = net_stats(net)
        rows.append(row)
        print(
            f"{path}: {_census(net)} AB={row['arcs']} AE={row['ng_edges']} "
            f"AE/AB={row['ratio']:.4f}"
        )
    if args.csv:
        path = Path(args.csv)
        fresh = not (args.append and path.exists())
        with open(path, "a" if args.append else "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=["nodes", "arcs", "ng_edges", "ratio"])
            if fresh:
                w.writeheader()
            for row in rows:
                w.writerow({**row, "ratio": f"{row['ratio']:.6f}"})
    return EXIT_OK


# -- check -------------------------------------------------------------------

def check_result(net, truth: GroundTruth, result: dict) -> list[tuple[str, bool, str]]:
    """Per planted pattern: (code, passed, detail)."""
    ng = to_e_netgraph(net)
    if result["noe"] != len(ng.edges):
        raise UsageError(
            f"result was mined from a graph with {result['noe']} edges, this net has {len(ng.edges)}"
        )
    for p in truth.patterns:
        for o in p.occurrences:
            missing = [e for e in o.events if e not in net.events]
            if missing:
                raise UsageError(f"truth occurrence {o.events} names events {missing} absent from the net")
    found = {p["code"]: p["support"] for p in result["patterns"]}
    verdicts = []
    for p in truth.patterns:
        sup = found.get(p.code)
        if sup is None:
            verdicts.append((p.code, False, "not found"))
        elif sup < p.expected_support:
            verdicts.append((p.code, False, f"support {sup} < {p.expected_support}"))
        else:
            verdicts.append((p.code, True, f"support {sup} >= {p.expected_support}"))
    return verdicts


def cmd_check(args) -> int:
    net = _load_net(args.net)
    truth = GroundTruth.from_json(Path(args.truth).read_text(encoding="utf-8"))
    result = read_result(args.result)
    verdicts = check_result(net, truth, result)
    for code, ok, detail in verdicts:
        print(f"{'PASS' if ok else 'FAIL'} {code} ({detail})")
    ok = all(v[1] for v in verdicts)
    print(f"{'all pass' if ok else 'verification failed'}: {sum(v[1] for v in verdicts)}/{len(verdicts)}")
    return EXIT_OK if ok else EXIT_FAIL


# -- bench -------------------------------------------------------------------

BENCH_FIELDS = ["arcs_target", "engine", "events", "conditions", "arcs", "status", "seconds", "peak_kb", "patterns"]


def _bench_cell(net_path, engine, min_sup, max_events, queue) -> None:
    net = read_cenet(net_path)
    t0 = time.perf_counter()
    if engine == "digcarl":
        res = mine_naive(net, min_sup, max_events)
    else:
        res = mine(to_e_netgraph(net), MiningConfig(min_sup))
    queue.put({"seconds": time.perf_counter() - t0, "peak_kb": _peak_kb(), "patterns": len(res.patterns)})


def run_bench_cell(net_path, engine, min_sup, max_events, timeout) -> dict:
    ctx = multiprocessing.get_context("fork")
    queue = ctx.Queue()
    proc = ctx.Process(target=_bench_cell, args=(str(net_path), engine, min_sup, max_events, queue))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.kill()
        proc.join()
        return {"status": "timeout", "seconds": timeout, "peak_kb": "", "patterns": ""}
    if proc.exitcode != 0 or queue.empty():
        return {"status": f"error({proc.exitcode})", "seconds": "", "peak_kb": "", "patterns": ""}
    return {"status": "ok", **queue.get()}


def cmd_bench(args) -> int:
    outdir = Path(args.workdir)
    outdir.mkdir(parents=True, exist_ok=True)
    params = GeneratorParams(
        x=OverlapKind.parse(args.overlap), H=args.max_arcs, U=1,
        event_alphabet_size=args.event_labels, cond_alphabet_size=args.cond_labels, seed=args.seed,
    )
    rows = []
    for target in args.sizes:
        net = generate_until_arcs(params, target)
        path = outdir / f"bench_{target}.cenet"
        write_cenet(net, path)
        for engine in args.engines:
            cell = run_bench_cell(path, engine, args.min_sup, args.max_events, args.timeout)
            row = {
                "arcs_target": target, "engine": engine, "events": len(net.events),
                "conditions": len(net.conditions), "arcs": len(net.arcs), **cell,
            }
            if isinstance(row["seconds"], float):
                row["seconds"] = f"{row['seconds']:.3f}"
            rows.append(row)
            print(f"{target:>7} {engine:8} {row['status']:8} {row['seconds']}s")
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


# -- ngraph ------------------------------------------------------------------

def cmd_ngraph(args) -> int:
    net = _load_net(args.input)
    ng = to_e_netgraph(net) if args.kind == "e" else to_c_netgraph(net)
    text = serialize_ngraph(ng)
    if args.output:
        _atomic_write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="petrimine", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"petrimine {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="append the run manifest (one JSON line) to this file")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress per level")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a random net, optionally with planted patterns")
    g.add_argument("--events", type=int, help="number of basic nets glued on (U)")
    g.add_argument("--overlap", default="c", help="c or e: node role used for gluing (x)")
    g.add_argument("--max-arcs", type=int, default=3, help="maximum merges per glue (H)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--event-labels", type=int, default=20)
    g.add_argument("--cond-labels", type=int, default=40)
    g.add_argument("--in-range", type=_range, default=(1, 3), metavar="LO:HI")
    g.add_argument("--out-range", type=_range, default=(1, 3), metavar="LO:HI")
    g.add_argument("--plant", nargs="*", default=[], metavar="NET", help="planting nets (.cenet)")
    g.add_argument("--plant-random", type=int, default=0, metavar="K", help="also plant K random nets")
    g.add_argument("--plant-events", type=int, default=3, help="max events per planting net (g)")
    g.add_argument("--plant-arcs", type=int, default=2, help="max merges per planted copy")
    g.add_argument("--min-sup", type=int)
    g.add_argument("--copy-bound", type=int, help="upper bound for drawn copy counts (default min-sup+3)")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("mine", parents=[common], help="mine frequent complete subnets")
    m.add_argument("input")
    m.add_argument("--min-sup", type=int, required=True)
    m.add_argument("--mis", type=_mis, default=("auto", 60), help="exact | greedy | auto[:N]")
    m.add_argument("--extension", choices=["paper", "complete"], default="paper")
    m.add_argument("--overlap", choices=["event", "condition"], default="event")
    m.add_argument("--engine", choices=["bigcarl", "digcarl"], default="bigcarl")
    m.add_argument("--max-level", type=int)
    m.add_argument("--max-events", type=int, default=4, help="digcarl: largest subnet enumerated")
    m.add_argument("--max-occurrences", type=int, default=1_000_000, help="digcarl: refusal threshold")
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_mine)

    s = sub.add_parser("stats", parents=[common], help="arc and net-graph edge census")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--csv")
    s.add_argument("--append", action="store_true")
    s.set_defaults(func=cmd_stats)

    c = sub.add_parser("check", parents=[common], help="verify a mining result against planted ground truth")
    c.add_argument("net")
    c.add_argument("truth")
    c.add_argument("result")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", parents=[common], help="runtime and memory of both engines over a size sweep")
    b.add_argument("--sizes", type=lambda t: [int(x) for x in t.split(",")], default=[1000, 2000, 3000, 4000, 5000])
    b.add_argument("--engines", type=lambda t: t.split(","), default=["bigcarl", "digcarl"])
    b.add_argument("--min-sup", type=int, default=10)
    b.add_argument("--max-events", type=int, default=3)
    b.add_argument("--timeout", type=float, default=600.0)
    b.add_argument("--overlap", default="c")
    b.add_argument("--max-arcs", type=int, default=3)
    b.add_argument("--event-labels", type=int, default=20)
    b.add_argument("--cond-labels", type=int, default=40)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workdir", default="bench_nets")
    b.add_argument("-o", "--output", default="bench.csv")
    b.set_defaults(func=cmd_bench)

    n = sub.add_parser("ngraph", parents=[common], help="write the net graph in the debug text format")
    n.add_argument("input")
    n.add_argument("--kind", choices=["e", "c"], default="e")
    n.add_argument("-o", "--output")
    n.set_defaults(func=cmd_ngraph)
    return parser


def _manifest(args, status: int, seconds: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "manifest", "verbose")}
    paths = {k: v for k, v in config.items() if k in ("input", "inputs", "output", "net", "truth", "result", "plant")}
    return {
        "command": args.command,
        "config": config,
        "seed": config.get("seed"),
        "paths": paths,
        "exit": status,
        "seconds": round(seconds, 4),
        "peak_rss_kb_approx": _peak_kb(),
        "version": __version__,
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    t0 = time.perf_counter()
    try:
        status = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"petrimine {args.command}: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except (NetError, NotClearError, OracleScaleError, ValueError, OSError) as exc:
        print(f"petrimine {args.command}: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    line = json.dumps(_manifest(args, status, time.perf_counter() - t0), sort_keys=True, default=str)
    if args.manifest:
        with open(args.manifest, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    else:
        print("manifest: " + line, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
