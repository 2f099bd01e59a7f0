"""Workflow graph extraction and token-game simulation.

A verified composition proof is also a wiring diagram: component leaves are
process stations, identity axioms are buffers, `times`/`par` nodes combine
and split parallel flows, `plus` injections and `with` cases handle the
optional flows, and every cut is one internal typed edge from a producer to
the consumer of the matching input.  :func:`extract_graph` reads that
diagram off the proof by structural recursion.

:func:`simulate` then plays the token game: one token per boundary input,
nodes fire when their required inputs are present, and a decision node
routes its shared context to whichever side the arriving optional token
selects.  Exhaustive simulation over all branch resolutions is the
engine's empirical check of the deadlock-freedom and resource-accounting
guarantees: a run must complete with no token stranded and with the
consumed/produced multisets exactly matching the boundary.

Edges are typed by the positive resource formula they carry.  Node kinds:

* ``process``  -- a component process instance
* ``buffer``   -- identity pass-through of one resource
* ``split``    -- tensor station (role ``combine`` or ``fanout``)
* ``merge``    -- plus station (role ``inject_left``/``inject_right``/``case``)
* ``input`` / ``output`` -- boundary pseudo-nodes
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import UnresolvedChoice
from .formulas import Atom, Formula, Plus, Tensor, dual, format_formula
from .kernel import CUT, ID, PAR, PLUS_L, PLUS_R, TIMES, WITH, ProofNode


@dataclass
class Node:
    id: str
    kind: str
    role: str = ""
    label: str = ""
    process: Optional[str] = None
    formula: Optional[Formula] = None
    ports: Dict[str, Formula] = field(default_factory=dict)


@dataclass
class Edge:
    src: str
    src_port: str
    dst: str
    dst_port: str
    formula: Formula
    optional: bool = False
    from_cut: bool = False


@dataclass
class WorkflowGraph:
    nodes: List[Node]
    edges: List[Edge]
    boundary_inputs: List[Tuple[Formula, str, str]]  # payload, input-node id, edge dst
    boundary_output: Formula
    # case router id -> {"left": [node ids...], "right": [...]}: the two
    # sub-networks a conditional selects between; only the chosen side runs
    case_cones: Dict[str, Dict[str, List[str]]] = field(default_factory=dict)

    def node(self, node_id: str) -> Node:
        return self._index()[node_id]

    def _index(self) -> Dict[str, Node]:
        idx = getattr(self, "_idx", None)
        if idx is None:
            idx = {n.id: n for n in self.nodes}
            self._idx = idx
        return idx

    def process_nodes(self) -> List[Node]:
        return [n for n in self.nodes if n.kind == "process"]

    def cut_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.from_cut]

    def in_edges(self, node_id: str) -> List[Edge]:
        return [e for e in self.edges if e.dst == node_id]

    def out_edges(self, node_id: str) -> List[Edge]:
        return [e for e in self.edges if e.src == node_id]

    def validate(self) -> None:
        """Check acyclicity and that edge types match both endpoint ports."""
        idx = self._index()
        for e in self.edges:
            for node_id, port in ((e.src, e.src_port), (e.dst, e.dst_port)):
                node = idx[node_id]
                declared = node.ports.get(port)
                if declared is None:
                    raise ValueError(f"edge references unknown port {node_id}:{port}")
                if declared is not e.formula:
                    raise ValueError(
                        f"edge type {format_formula(e.formula)} does not match "
                        f"port {node_id}:{port} ({format_formula(declared)})"
                    )
        incoming = {n.id: 0 for n in self.nodes}
        for e in self.edges:
            incoming[e.dst] += 1
        ready = [nid for nid, deg in incoming.items() if deg == 0]
        seen = 0
        outs: Dict[str, List[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            outs[e.src].append(e.dst)
        while ready:
            nid = ready.pop()
            seen += 1
            for succ in outs[nid]:
                incoming[succ] -= 1
                if incoming[succ] == 0:
                    ready.append(succ)
        if seen != len(self.nodes):
            raise ValueError("workflow graph contains a cycle")

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind,
                    "role": n.role,
                    "label": n.label,
                    "process": n.process,
                    "formula": format_formula(n.formula) if n.formula is not None else None,
                    "ports": {p: format_formula(f) for p, f in n.ports.items()},
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "src": e.src,
                    "src_port": e.src_port,
                    "dst": e.dst,
                    "dst_port": e.dst_port,
                    "type": format_formula(e.formula),
                    "optional": e.optional,
                    "cut": e.from_cut,
                }
                for e in self.edges
            ],
            "boundary": {
                "inputs": [format_formula(f) for f, _, _ in self.boundary_inputs],
                "output": format_formula(self.boundary_output),
            },
            "case_cones": self.case_cones,
        }

    def to_dot(self) -> str:
        """Graphviz rendering: boxes for processes, triangles for plumbing,
        dashed edges for optional flows."""
        shapes = {
            "process": "box",
            "buffer": "triangle",
            "split": "triangle",
            "merge": "triangle",
            "input": "plaintext",
            "output": "plaintext",
        }
        lines = ["digraph workflow {", "  rankdir=LR;"]
        for n in self.nodes:
            label = n.label or n.id
            lines.append(
                f'  "{n.id}" [shape={shapes[n.kind]}, label="{label}"];'
            )
        for e in self.edges:
            style = ", style=dashed" if e.optional else ""
            lines.append(
                f'  "{e.src}" -> "{e.dst}" [label="{format_formula(e.formula)}"{style}];'
            )
        lines.append("}")
        return "\n".join(lines)


@dataclass
class _Fragment:
    inputs: List[Tuple[Formula, str, str]]  # (negative formula, node id, port)
    output: Tuple[Formula, str, str]  # (positive formula, node id, port)
    span: Tuple[int, int] = (0, 0)  # node-index range of this subtree


class _Extractor:
    def __init__(self, specs: Dict[str, "object"]):
        self.specs = specs
        self.nodes: List[Node] = []
        self.edges: List[Edge] = []
        self.case_cones: Dict[str, Dict[str, List[str]]] = {}
        self._n = 0

    def fresh(self, prefix: str) -> str:
        self._n += 1
        return f"{prefix}{self._n}"

    def add_node(self, node: Node) -> Node:
        self.nodes.append(node)
        return node

    def connect(self, src, dst, formula, *, optional=False, from_cut=False):
        self.edges.append(
            Edge(src[0], src[1], dst[0], dst[1], formula, optional=optional, from_cut=from_cut)
        )

    def build(self, root: ProofNode) -> WorkflowGraph:
        # Post-order with an explicit value stack: subproofs may be shared
        # objects (the prover memoizes), but every occurrence is its own
        # station in the workflow, so fragments are per occurrence.
        values: List[_Fragment] = []
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                n = len(node.premises)
                premises = values[len(values) - n :] if n else []
                del values[len(values) - n :]
                lo = premises[0].span[0] if premises else len(self.nodes)
                frag = self._emit(node, premises)
                frag.span = (lo, len(self.nodes))
                values.append(frag)
            else:
                stack.append((node, True))
                for p in reversed(node.premises):
                    stack.append((p, False))
        top = values.pop()
        boundary_inputs = []
        for neg, nid, port in top.inputs:
            payload = dual(neg)
            src = self.add_node(
                Node(
                    self.fresh("in"),
                    "input",
                    label=format_formula(payload),
                    formula=payload,
                    ports={"out": payload},
                )
            )
            self.connect((src.id, "out"), (nid, port), payload)
            boundary_inputs.append((payload, src.id, nid))
        out_f, out_nid, out_port = top.output
        sink = self.add_node(
            Node(
                "out",
                "output",
                label=format_formula(out_f),
                formula=out_f,
                ports={"in": out_f},
            )
        )
        self.connect((out_nid, out_port), (sink.id, "in"), out_f)
        return WorkflowGraph(self.nodes, self.edges, boundary_inputs, out_f, self.case_cones)

    def _emit(self, node: ProofNode, premises: List[_Fragment]) -> _Fragment:
        if node.process is not None:
            spec = self.specs[node.process]
            ports = {f"in{i}": dual(g) for i, g in enumerate(spec.inputs.formulas)}
            ports["out"] = spec.output
            n = self.add_node(
                Node(
                    self.fresh("p"),
                    "process",
                    label=node.process,
                    process=node.process,
                    formula=spec.output,
                    ports=ports,
                )
            )
            ins = [
                (g, n.id, f"in{i}") for i, g in enumerate(spec.inputs.formulas)
            ]
            return _Fragment(ins, (spec.output, n.id, "out"))
        tag = node.rule.tag
        if tag == ID:
            a = node.rule.a
            n = self.add_node(
                Node(
                    self.fresh("b"),
                    "buffer",
                    label=format_formula(a),
                    formula=a,
                    ports={"in": a, "out": a},
                )
            )
            return _Fragment([(dual(a), n.id, "in")], (a, n.id, "out"))
        if tag == TIMES:
            f1, f2 = premises
            a, b = node.rule.a, node.rule.b
            composite = _tensor_of(node)
            n = self.add_node(
                Node(
                    self.fresh("s"),
                    "split",
                    role="combine",
                    label="*",
                    formula=composite,
                    ports={"in_l": a, "in_r": b, "out": composite},
                )
            )
            self.connect(f1.output[1:], (n.id, "in_l"), a)
            self.connect(f2.output[1:], (n.id, "in_r"), b)
            return _Fragment(f1.inputs + f2.inputs, (composite, n.id, "out"))
        if tag == PAR:
            (f1,) = premises
            a, b = node.rule.a, node.rule.b
            composite = _tensor_of(node)
            n = self.add_node(
                Node(
                    self.fresh("s"),
                    "split",
                    role="fanout",
                    label="*",
                    formula=composite,
                    ports={"in": composite, "out_l": a, "out_r": b},
                )
            )
            ins = list(f1.inputs)
            pa = _pop_input(ins, dual(a))
            pb = _pop_input(ins, dual(b))
            self.connect((n.id, "out_l"), pa[1:], a)
            self.connect((n.id, "out_r"), pb[1:], b)
            ins.append((dual(composite), n.id, "in"))
            return _Fragment(ins, f1.output)
        if tag in (PLUS_L, PLUS_R):
            (f1,) = premises
            a, b = node.rule.a, node.rule.b
            out = _plus_of(node)
            role = "inject_left" if tag == PLUS_L else "inject_right"
            n = self.add_node(
                Node(
                    self.fresh("m"),
                    "merge",
                    role=role,
                    label="+",
                    formula=out,
                    ports={"in": a if tag == PLUS_L else b, "out": out},
                )
            )
            self.connect(f1.output[1:], (n.id, "in"), f1.output[0], optional=True)
            return _Fragment(f1.inputs, (out, n.id, "out"))
        if tag == WITH:
            return self._emit_with(node, premises)
        if tag == CUT:
            f1, f2 = premises
            c = node.rule.a
            ins = list(f2.inputs)
            target = _pop_input(ins, dual(c))
            self.connect(f1.output[1:], target[1:], c, from_cut=True)
            return _Fragment(f1.inputs + ins, f2.output)
        raise ValueError(f"cannot extract rule {tag!r}")

    def _emit_with(self, node: ProofNode, premises: List[_Fragment]) -> _Fragment:
        # Two stations: a router that sends the optional token and the
        # shared context to the selected side, and a collector that merges
        # the sides' (identically typed) results back into one flow.
        f1, f2 = premises
        a, b = node.rule.a, node.rule.b
        selector = _plus_of(node)
        ins1 = list(f1.inputs)
        ins2 = list(f2.inputs)
        pa = _pop_input(ins1, dual(a))
        pb = _pop_input(ins2, dual(b))
        out_f = f1.output[0]
        ports = {"sel": selector, "branch_l": a, "branch_r": b}
        ctx_pairs = _pair_contexts(ins1, ins2)
        for j, (g, _, _) in enumerate(ctx_pairs):
            payload = dual(g)
            ports[f"ctx{j}"] = payload
            ports[f"ctx{j}_l"] = payload
            ports[f"ctx{j}_r"] = payload
        router = self.add_node(
            Node(
                self.fresh("m"),
                "merge",
                role="case",
                label="+?",
                formula=selector,
                ports=ports,
            )
        )
        self.case_cones[router.id] = {
            "left": [n.id for n in self.nodes[f1.span[0] : f1.span[1]]],
            "right": [n.id for n in self.nodes[f2.span[0] : f2.span[1]]],
        }
        collect = self.add_node(
            Node(
                self.fresh("m"),
                "merge",
                role="collect",
                label="+",
                formula=out_f,
                ports={"res_l": out_f, "res_r": out_f, "out": out_f},
            )
        )
        self.connect((router.id, "branch_l"), pa[1:], a, optional=True)
        self.connect((router.id, "branch_r"), pb[1:], b, optional=True)
        self.connect(f1.output[1:], (collect.id, "res_l"), out_f)
        self.connect(f2.output[1:], (collect.id, "res_r"), out_f)
        new_inputs = [(dual(selector), router.id, "sel")]
        for j, (g, left, right) in enumerate(ctx_pairs):
            payload = dual(g)
            self.connect((router.id, f"ctx{j}_l"), left[1:], payload)
            self.connect((router.id, f"ctx{j}_r"), right[1:], payload)
            new_inputs.append((g, router.id, f"ctx{j}"))
        return _Fragment(new_inputs, (out_f, collect.id, "out"))


def _tensor_of(node: ProofNode) -> Formula:
    from .formulas import tensor as _t

    return _t(node.rule.a, node.rule.b)


def _plus_of(node: ProofNode) -> Formula:
    from .formulas import plus as _p

    return _p(node.rule.a, node.rule.b)


def _pop_input(ins: List[Tuple[Formula, str, str]], want: Formula):
    for i, entry in enumerate(ins):
        if entry[0] is want:
            return ins.pop(i)
    raise ValueError(f"fragment lacks input {format_formula(want)}")


def _pair_contexts(ins1, ins2):
    """Align the two equal context multisets of a case node by canonical
    order; equal-typed ports are interchangeable, so the pairing is safe."""
    key = lambda entry: entry[0].key
    s1 = sorted(ins1, key=key)
    s2 = sorted(ins2, key=key)
    if len(s1) != len(s2):
        raise ValueError("case contexts of different size")
    out = []
    for left, right in zip(s1, s2):
        if left[0] is not right[0]:
            raise ValueError("case contexts do not align")
        out.append((left[0], left, right))
    return out


def extract_graph(composition) -> WorkflowGraph:
    """Extract the dataflow graph of a composition (proof must verify)."""
    specs = {c.name: c for c in composition.components}
    graph = _Extractor(specs).build(composition.proof)
    return graph


# --------------------------------------------------------------------------
# token values and branch resolutions


def all_values(f: Formula) -> List[tuple]:
    """Every fully-resolved concrete value of a positive formula."""
    if isinstance(f, Atom):
        return [("atom", f.name)]
    if isinstance(f, Tensor):
        return [
            ("pair", a, b)
            for a in all_values(f.l)
            for b in all_values(f.r)
        ]
    if isinstance(f, Plus):
        return [("opt", "left", v) for v in all_values(f.l)] + [
            ("opt", "right", v) for v in all_values(f.r)
        ]
    raise UnresolvedChoice(f"cannot enumerate values of {format_formula(f)}")


def value_atoms(v: tuple) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    stack = [v]
    while stack:
        cur = stack.pop()
        if cur[0] == "atom":
            counts[cur[1]] = counts.get(cur[1], 0) + 1
        elif cur[0] == "pair":
            stack.append(cur[1])
            stack.append(cur[2])
        else:
            stack.append(cur[2])
    return counts


def value_text(v: tuple) -> str:
    if v[0] == "atom":
        return v[1]
    if v[0] == "pair":
        return f"({value_text(v[1])}*{value_text(v[2])})"
    return f"{v[1]}({value_text(v[2])})"


def resolve_choice(f: Formula, choice) -> tuple:
    """Normalize a user-supplied branch choice into a concrete value.

    Accepts a concrete value tuple, or "left"/"right" for a formula whose
    only optionality is the top-level one.
    """
    if isinstance(choice, tuple):
        _check_value(f, choice)
        return choice
    if choice in ("left", "right") and isinstance(f, Plus):
        sub = f.l if choice == "left" else f.r
        opts = all_values(sub)
        if len(opts) != 1:
            raise UnresolvedChoice(
                f"branch {choice!r} of {format_formula(f)} still has optional parts; "
                "provide a full value"
            )
        return ("opt", choice, opts[0])
    raise UnresolvedChoice(f"cannot interpret choice {choice!r} for {format_formula(f)}")


def _check_value(f: Formula, v: tuple) -> None:
    ok = (
        (isinstance(f, Atom) and v[0] == "atom" and v[1] == f.name)
        or (isinstance(f, Tensor) and v[0] == "pair")
        or (isinstance(f, Plus) and v[0] == "opt")
    )
    if not ok:
        raise UnresolvedChoice(f"value {v!r} does not match {format_formula(f)}")
    if v[0] == "pair":
        _check_value(f.l, v[1])
        _check_value(f.r, v[2])
    elif v[0] == "opt":
        _check_value(f.l if v[1] == "left" else f.r, v[2])


@dataclass
class SimReport:
    branch_choices: Dict[str, str]
    consumed: Dict[str, int]
    produced: Dict[str, int]
    completed: bool
    step_count: int
    output_value: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "branch_choices": dict(self.branch_choices),
            "consumed": dict(self.consumed),
            "produced": dict(self.produced),
            "completed": self.completed,
            "step_count": self.step_count,
            "output": value_text(self.output_value) if self.output_value else None,
        }


def choice_points(graph: WorkflowGraph) -> Dict[str, Formula]:
    """Nodes whose emitted value is not forced: processes and boundary
    inputs (keyed by process name / input node id)."""
    points = {}
    for n in graph.nodes:
        if n.kind == "process":
            points[n.process] = n.formula
        elif n.kind == "input":
            points[n.id] = n.formula
    return points


def enumerate_choices(graph: WorkflowGraph) -> List[Dict[str, tuple]]:
    points = choice_points(graph)
    keys = sorted(points)
    value_lists = [all_values(points[k]) for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*value_lists)]


class _Sim:
    def __init__(self, graph: WorkflowGraph, choices: Dict[str, object]):
        self.graph = graph
        self.points = choice_points(graph)
        self.choices = {}
        for key, formula in self.points.items():
            if key in choices:
                self.choices[key] = resolve_choice(formula, choices[key])
            else:
                vals = all_values(formula)
                if len(vals) > 1:
                    raise UnresolvedChoice(
                        f"no branch resolution given for {key} ({format_formula(formula)})"
                    )
                self.choices[key] = vals[0]
        extra = set(choices) - set(self.points)
        if extra:
            raise UnresolvedChoice(f"choices reference unknown nodes: {sorted(extra)}")
        self.tokens: Dict[Tuple[str, str], tuple] = {}
        self.edge_by_src = {(e.src, e.src_port): e for e in graph.edges}
        self.in_edges: Dict[str, List[Edge]] = {}
        for e in graph.edges:
            self.in_edges.setdefault(e.dst, []).append(e)
        self.case_sides: Dict[str, str] = {}
        # nodes inside a conditional cone may only run once their router has
        # decided for their side; this is what keeps sourceless processes on
        # the untaken branch from firing
        self.gates: Dict[str, List[Tuple[str, str]]] = {}
        for router_id, cones in graph.case_cones.items():
            for side, members in cones.items():
                for member in members:
                    self.gates.setdefault(member, []).append((router_id, side))
        self.steps = 0
        self.consumed: Dict[str, int] = {}
        self.produced: Dict[str, int] = {}
        self.output_value: Optional[tuple] = None

    def emit(self, node_id: str, port: str, value: tuple) -> None:
        edge = self.edge_by_src[(node_id, port)]
        self.tokens[(edge.dst, edge.dst_port)] = value

    def run(self) -> SimReport:
        for payload, nid, _ in self.graph.boundary_inputs:
            value = self.choices[nid]
            for name, k in value_atoms(value).items():
                self.consumed[name] = self.consumed.get(name, 0) + k
            self.emit(nid, "out", value)
        progress = True
        while progress:
            progress = False
            for node in self.graph.nodes:
                if self._try_fire(node):
                    progress = True
        completed = self.output_value is not None and not self.tokens
        report_choices = {
            k: value_text(v) for k, v in self.choices.items() if _has_plus(self.points[k])
        }
        return SimReport(
            branch_choices=report_choices,
            consumed=self.consumed,
            produced=self.produced,
            completed=completed,
            step_count=self.steps,
            output_value=self.output_value,
        )

    def _take(self, node_id: str, port: str) -> tuple:
        return self.tokens.pop((node_id, port))

    def _has(self, node_id: str, port: str) -> bool:
        return (node_id, port) in self.tokens

    def _try_fire(self, node: Node) -> bool:
        nid = node.id
        for router_id, side in self.gates.get(nid, ()):
            if self.case_sides.get(router_id) != side:
                return False
        if node.kind == "process":
            needed = [p for p in node.ports if p.startswith("in")]
            if needed and not all(self._has(nid, p) for p in needed):
                return False
            if not self._has_fired(nid):
                for p in needed:
                    self._take(nid, p)
                self.emit(nid, "out", self.choices[node.process])
                self._mark_fired(nid)
                self.steps += 1
                return True
            return False
        if node.kind == "buffer":
            if self._has(nid, "in"):
                self.emit(nid, "out", self._take(nid, "in"))
                self.steps += 1
                return True
            return False
        if node.kind == "split" and node.role == "combine":
            if self._has(nid, "in_l") and self._has(nid, "in_r"):
                v = ("pair", self._take(nid, "in_l"), self._take(nid, "in_r"))
                self.emit(nid, "out", v)
                self.steps += 1
                return True
            return False
        if node.kind == "split":  # fanout
            if self._has(nid, "in"):
                v = self._take(nid, "in")
                self.emit(nid, "out_l", v[1])
                self.emit(nid, "out_r", v[2])
                self.steps += 1
                return True
            return False
        if node.kind == "merge" and node.role in ("inject_left", "inject_right"):
            if self._has(nid, "in"):
                side = "left" if node.role == "inject_left" else "right"
                self.emit(nid, "out", ("opt", side, self._take(nid, "in")))
                self.steps += 1
                return True
            return False
        if node.kind == "merge" and node.role == "case":
            fired = False
            if self._has(nid, "sel") and nid not in self.case_sides:
                v = self._take(nid, "sel")
                side = v[1]
                self.case_sides[nid] = side
                self.emit(nid, "branch_l" if side == "left" else "branch_r", v[2])
                self.steps += 1
                fired = True
            side = self.case_sides.get(nid)
            if side is not None:
                suffix = "_l" if side == "left" else "_r"
                for port in list(node.ports):
                    if port.startswith("ctx") and "_" not in port and self._has(nid, port):
                        self.emit(nid, port + suffix, self._take(nid, port))
                        fired = True
            return fired
        if node.kind == "merge":  # collect
            for res_port in ("res_l", "res_r"):
                if self._has(nid, res_port):
                    self.emit(nid, "out", self._take(nid, res_port))
                    self.steps += 1
                    return True
            return False
        if node.kind == "output":
            if self._has(nid, "in"):
                self.output_value = self._take(nid, "in")
                for name, k in value_atoms(self.output_value).items():
                    self.produced[name] = self.produced.get(name, 0) + k
                return True
            return False
        return False

    def _has_fired(self, nid: str) -> bool:
        return nid in getattr(self, "_fired", set())

    def _mark_fired(self, nid: str) -> None:
        if not hasattr(self, "_fired"):
            self._fired = set()
        self._fired.add(nid)


def _has_plus(f: Formula) -> bool:
    if isinstance(f, Plus):
        return True
    if isinstance(f, Tensor):
        return _has_plus(f.l) or _has_plus(f.r)
    return False


def simulate(graph: WorkflowGraph, choices: Optional[Dict[str, object]] = None) -> SimReport:
    """Run one token game with the given branch resolutions."""
    return _Sim(graph, choices or {}).run()


def simulate_all(graph: WorkflowGraph) -> List[SimReport]:
    """Exhaustive simulation over every branch resolution."""
    return [_Sim(graph, c).run() for c in enumerate_choices(graph)]
