"""Command line interface.

Work against a JSON workspace file (``--workspace``, default
``./workspace.json``), which is created on first use:

    llflow add DeliverDrug '~Patient, ~Dosage, ~NurseTime, Treated+Failed'
    llflow add Reassess '~Failed, ~ClinTime, Reassessed'
    llflow compose join DeliverDrug Reassess --priority r --input '~Failed'
    llflow simulate c1
    llflow render c1 --dot
    llflow prove 'A*B' 'B*A'
    llflow selftest
    llflow serve --port 8000
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import LLFlowError
from .formulas import format_sequent, parse_formula
from .graph import extract_graph, simulate, simulate_all
from .kernel import proof_to_dict
from .provers import prove_filter
from .workspace import Workspace, handle_compose


def _load(path: str) -> Workspace:
    if os.path.exists(path):
        return Workspace.load(path)
    return Workspace()


def _steps(compact: str):
    table = {"l": "left", "r": "right"}
    parts = [p for p in compact.replace(",", "").lower() if p.strip()]
    return [table[p] for p in parts]


def cmd_add(ws: Workspace, args) -> int:
    spec = ws.add_process(args.name, args.sequent)
    print(f"added {spec.name}: |- {format_sequent(spec.sequent())}")
    return 0


def cmd_list(ws: Workspace, args) -> int:
    for spec in ws.processes.values():
        print(f"process     {spec.name:20} |- {format_sequent(spec.sequent())}")
    for cid, comp in ws.compositions.items():
        print(f"composition {cid:20} |- {format_sequent(comp.spec.sequent())}")
    return 0


def cmd_compose(ws: Workspace, args) -> int:
    selections = {}
    if args.input_p is not None:
        selections["input_p"] = args.input_p
    if args.input_q is not None:
        selections["input_q"] = args.input_q
    if args.input is not None:
        selections["input_q"] = args.input
    if args.priority:
        selections["priority"] = _steps(args.priority)
    result = handle_compose(
        ws,
        {
            "action": args.action,
            "operands": [args.left, args.right],
            "selections": selections,
            "name": args.name,
        },
    )
    summary = result["composition"]
    print(f"stored {summary['id']}: |- {summary['spec']}")
    return 0


def cmd_simulate(ws: Workspace, args) -> int:
    comp = ws.resolve(args.id)
    graph = extract_graph(comp)
    if args.choices:
        reports = [simulate(graph, json.loads(args.choices))]
    else:
        reports = simulate_all(graph)
    for rep in reports:
        d = rep.to_dict()
        status = "completed" if d["completed"] else "DEADLOCKED"
        print(
            f"{status}: choices={d['branch_choices']} consumed={d['consumed']} "
            f"produced={d['produced']} steps={d['step_count']}"
        )
    return 0 if all(r.completed for r in reports) else 1


def cmd_render(ws: Workspace, args) -> int:
    comp = ws.resolve(args.id)
    graph = extract_graph(comp)
    if args.dot:
        print(graph.to_dot())
    else:
        print(json.dumps(graph.to_dict(), indent=1))
    return 0


def cmd_proof(ws: Workspace, args) -> int:
    comp = ws.resolve(args.id)
    print(json.dumps(proof_to_dict(comp.proof), indent=1))
    return 0


def cmd_prove(ws: Workspace, args) -> int:
    src = parse_formula(args.src)
    dst = parse_formula(args.dst)
    proof = prove_filter(src, dst)
    if proof is None:
        print("unprovable")
        return 1
    print(json.dumps(proof_to_dict(proof), indent=1))
    return 0


def cmd_selftest(ws: Workspace, args) -> int:
    from .fixtures import iter_selftest

    failures = 0
    for name, ok, detail in iter_selftest():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1
    print(f"selftest: {'all green' if failures == 0 else f'{failures} failing'}")
    return 0 if failures == 0 else 1


def cmd_serve(ws: Workspace, args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ws), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llflow", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--workspace", default="workspace.json", help="workspace file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("add", help="store a process specification")
    p.add_argument("name")
    p.add_argument("sequent")
    p.set_defaults(fn=cmd_add, mutates=True)

    p = sub.add_parser("list", help="list processes and compositions")
    p.set_defaults(fn=cmd_list, mutates=False)

    p = sub.add_parser("compose", help="run a composition action")
    p.add_argument("action", choices=["tensor", "with", "join"])
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--name")
    p.add_argument("--priority", help="path into the producer output, e.g. l,r")
    p.add_argument("--input", help="input of the right operand (join): index or text like '~Failed'")
    p.add_argument("--input-p", help="input of the left operand (with): index or text")
    p.add_argument("--input-q", help="input of the right operand (with): index or text")
    p.set_defaults(fn=cmd_compose, mutates=True)

    p = sub.add_parser("simulate", help="token-simulate a composition")
    p.add_argument("id")
    p.add_argument("--choices", help="JSON branch resolution; omit for exhaustive")
    p.set_defaults(fn=cmd_simulate, mutates=False)

    p = sub.add_parser("render", help="print a composition's workflow graph")
    p.add_argument("id")
    p.add_argument("--dot", action="store_true", help="emit graphviz instead of JSON")
    p.set_defaults(fn=cmd_render, mutates=False)

    p = sub.add_parser("proof", help="print a composition's derivation")
    p.add_argument("id")
    p.set_defaults(fn=cmd_proof, mutates=False)

    p = sub.add_parser("prove", help="search for a conversion lemma between two types")
    p.add_argument("src")
    p.add_argument("dst")
    p.set_defaults(fn=cmd_prove, mutates=False)

    p = sub.add_parser("selftest", help="run the golden composition suites")
    p.set_defaults(fn=cmd_selftest, mutates=False)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve, mutates=False)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ws = _load(args.workspace)
    try:
        code = args.fn(ws, args)
    except LLFlowError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 2
    if code == 0 and getattr(args, "mutates", False):
        ws.save(args.workspace)
    return code


if __name__ == "__main__":
    sys.exit(main())
