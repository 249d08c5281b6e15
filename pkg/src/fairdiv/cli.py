"""Command-line front end: instance generation, solver dispatch,
fairness checking, exhaustive verification and DOT graph export.

Exit codes: 0 success / property holds, 1 fairness property fails,
2 usage or valuation-class error, 3 enumeration budget or feasibility trip.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

from . import algorithms, instances, oracles, serialize
from .core import FairnessNotion, Instance, UnsupportedValuationError, items_of

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

AGENT_COLORS = ("red", "blue", "green", "orange", "purple", "brown", "cyan", "magenta")


def _budget() -> Optional[int]:
    raw = os.environ.get("FAIRDIV_BUDGET")
    return int(raw) if raw else None


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str) -> Instance:
    with open(path) as fh:
        return serialize.instance_from_doc(serialize.loads(fh.read()))


def _load_allocation(path: str) -> tuple:
    with open(path) as fh:
        return serialize.allocation_from_doc(serialize.loads(fh.read()))


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    params = {}
    if args.n is not None:
        params["n"] = args.n
    if args.m is not None:
        params["m"] = args.m
    if args.monotone:
        params["monotone"] = True
    if args.non_normalized:
        params["normalized"] = False
    try:
        inst = instances.sample_random(
            instances.GeneratorSpec(args.kind, args.seed, params)
        )
    except KeyError as exc:
        print(f"error: generator '{args.kind}' requires parameter {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(serialize.dumps(serialize.instance_to_doc(inst)), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    try:
        if args.algo == "maf":
            bundles, trace = algorithms.match_and_freeze(inst)
            trace_lines = algorithms.maf_trace_lines(trace)
        elif args.algo == "ccg":
            bundles, trace = algorithms.cut_and_choose_graph_procedure(inst)
            trace_lines = algorithms.ccg_trace_lines(trace)
        else:
            bundles = algorithms.reversed_round_robin(inst, args.leftover_agent)
            trace_lines = []
    except UnsupportedValuationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except algorithms.CutAndChooseStuckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.trace:
        for line in trace_lines:
            print(line)
    _write(serialize.dumps(serialize.allocation_to_doc(bundles)), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    budget = _budget()
    try:
        if args.notion == "feasible":
            verdicts = [oracles.check_mms_feasible(v, budget) for v in inst.valuations]
            doc = {"notion": "feasible", "holds": all(verdicts), "per_agent": verdicts}
        else:
            notion = FairnessNotion(args.notion)
            bundles = _load_allocation(args.alloc)
            report = oracles.check(inst, bundles, notion, budget)
            doc = {
                "notion": args.notion,
                "holds": report.holds,
                "violations": [
                    {"envier": f.envier, "envied": f.envied, "witness": _witness_doc(f.witness)}
                    for f in report.violations
                ],
            }
    except UnsupportedValuationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracles.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _write(serialize.dumps(doc), args.out)
    return EXIT_OK if doc["holds"] else EXIT_FAIL


def _witness_doc(witness):
    if isinstance(witness, int):
        return witness
    return [sorted(items_of(mask)) for mask in witness]


def cmd_verify(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    budget = _budget()
    start = time.monotonic()
    try:
        if args.claim == "no-pmms":
            found = oracles.exists_fair_allocation(inst, FairnessNotion.PMMS, budget)
            doc = {
                "claim": "no-pmms",
                "scanned": inst.n ** inst.m,
                "found": None if found is None else serialize.allocation_to_doc(found)["bundles"],
                "holds": found is None,
            }
        elif args.claim == "mms-exists":
            found = oracles.exists_fair_allocation(inst, FairnessNotion.MMS, budget)
            doc = {
                "claim": "mms-exists",
                "scanned": inst.n ** inst.m,
                "found": None if found is None else serialize.allocation_to_doc(found)["bundles"],
                "holds": found is not None,
            }
        elif args.claim == "mnw-not-efx":
            best, argmax = oracles.nash_welfare_maximizers(inst, budget)
            all_fail = all(not oracles.check_efx(inst, b).holds for b in argmax)
            doc = {
                "claim": "mnw-not-efx",
                "max_nash_welfare": serialize.rational_to_json(best),
                "maximizers": [serialize.allocation_to_doc(b)["bundles"] for b in argmax],
                "holds": all_fail,
            }
        else:  # triangle-free
            graph = oracles.pair_compatibility_graph(inst, budget)
            doc = {
                "claim": "triangle-free",
                "nodes": len(graph.nodes) - len(graph.isolated_nodes()),
                "edges": len(graph.edges),
                "triangle": graph.has_triangle(),
                "holds": not graph.has_triangle(),
            }
    except oracles.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    doc["seconds"] = round(time.monotonic() - start, 3)
    _write(serialize.dumps(doc), args.out)
    return EXIT_OK if doc["holds"] else EXIT_FAIL


def _compat_dot(inst: Instance) -> str:
    graph = oracles.pair_compatibility_graph(inst, _budget())
    isolated = set(graph.isolated_nodes())

    def node_id(node):
        agent, mask = node
        items = "".join(str(g) for g in items_of(mask))
        return f"a{agent}_{items}"

    lines = ["graph compat {"]
    for node in graph.nodes:
        if node in isolated:
            continue
        agent, mask = node
        label = "{" + ",".join(
            inst.labels[g] if inst.labels else str(g) for g in items_of(mask)
        ) + "}"
        color = AGENT_COLORS[agent % len(AGENT_COLORS)]
        lines.append(f'  {node_id(node)} [label="{agent}:{label}", color={color}];')
    for u, w in graph.edges:
        lines.append(f"  {node_id(u)} -- {node_id(w)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ccg_dot(inst: Instance, bundles, agent: int) -> str:
    pi = algorithms.build_cut_and_choose_graph(inst, bundles, agent)
    lines = ["digraph ccg {"]
    for i in range(inst.n):
        color = AGENT_COLORS[i % len(AGENT_COLORS)]
        lines.append(f'  a{i} [label="{i}", color={color}];')
    for i, j in enumerate(pi):
        lines.append(f"  a{i} -> a{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_graph(args) -> int:
    inst = _load_instance(getattr(args, "in"))
    if args.kind == "compat":
        text = _compat_dot(inst)
    else:
        if args.alloc is None or args.agent is None:
            print("error: --kind ccg requires --alloc and --agent", file=sys.stderr)
            return EXIT_USAGE
        bundles = _load_allocation(args.alloc)
        text = _ccg_dot(inst, bundles, args.agent)
    _write(text, args.dot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance document")
    p.add_argument("--kind", required=True, choices=instances.GENERATOR_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--monotone", action="store_true",
                   help="restrict binary sampling to monotone tables")
    p.add_argument("--non-normalized", action="store_true",
                   help="allow v(empty) = 1 in binary sampling")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run an allocation algorithm")
    p.add_argument("--algo", required=True, choices=("maf", "ccg", "rrr"))
    p.add_argument("--in", required=True)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--leftover-agent", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check a fairness notion on an allocation")
    p.add_argument("--notion", required=True,
                   choices=("efx", "efx+", "pmms", "mms", "feasible"))
    p.add_argument("--in", required=True)
    p.add_argument("--alloc")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="run an exhaustive verification claim")
    p.add_argument("--claim", required=True,
                   choices=("no-pmms", "mms-exists", "mnw-not-efx", "triangle-free"))
    p.add_argument("--in", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-graph", help="export a graph in DOT format")
    p.add_argument("--in", required=True)
    p.add_argument("--kind", required=True, choices=("compat", "ccg"))
    p.add_argument("--alloc")
    p.add_argument("--agent", type=int)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_export_graph)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check" and args.notion != "feasible" and not args.alloc:
        print("error: --alloc is required unless --notion feasible", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
