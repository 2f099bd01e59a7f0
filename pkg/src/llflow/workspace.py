"""Workspace: named specs, stored compositions, and persistence.

A workspace maps process names to specifications and composition ids to
:class:`Composition` objects, with a revision counter that bumps on every
successful mutation.  Mutations are transactional: a failing action leaves
the workspace untouched.

The on-disk format is versioned JSON with formulas in the text syntax;
proofs round-trip through :func:`kernel.proof_from_dict`, which re-applies
every rule on load, so a tampered file cannot produce an unverifiable
composition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .actions import (
    ActionRecord,
    Composition,
    Selection,
    join_action,
    tensor_action,
    with_action,
)
from .errors import DuplicateName, LLFlowError, ParseError, UnknownProcess, VersionMismatch
from .formulas import ProcessSpec, format_sequent, parse_sequent, validate_spec
from .graph import extract_graph
from .kernel import proof_from_dict, proof_to_dict, verify

FORMAT_VERSION = 1


@dataclass
class Workspace:
    processes: Dict[str, ProcessSpec] = field(default_factory=dict)
    compositions: Dict[str, Composition] = field(default_factory=dict)
    revision: int = 0
    _next_id: int = 0
    _next_anon: int = 0
    _pending_anons: List[ProcessSpec] = field(default_factory=list)

    # -- processes ---------------------------------------------------------

    def add_process(self, name: str, sequent_text: str) -> ProcessSpec:
        if name in self.processes:
            raise DuplicateName(f"process {name!r} already exists")
        spec = validate_spec(name, parse_sequent(sequent_text))
        self.processes[name] = spec
        self.revision += 1
        return spec

    def resolve(self, ref: str) -> Composition:
        """A reference is a process name or a composition id."""
        if ref in self.compositions:
            return self.compositions[ref]
        if ref in self.processes:
            from .actions import as_composition

            return as_composition(self.processes[ref])
        raise UnknownProcess(f"unknown process or composition {ref!r}")

    def _resolve_operand(self, ref: str):
        """Resolve a stored reference, or accept a raw sequent in the text
        syntax as an anonymous process (registered only if the action
        succeeds).  Returns (composition, pending spec or None)."""
        from .actions import as_composition

        try:
            return self.resolve(ref), None
        except UnknownProcess:
            if ref.isidentifier():
                raise
        name = f"x{self._next_anon + len(self._pending_anons) + 1}"
        spec = validate_spec(name, parse_sequent(ref))
        self._pending_anons.append(spec)
        return as_composition(spec), spec

    # -- composing ----------------------------------------------------------

    def compose(self, action: str, operands: List[str], selections: Optional[dict] = None,
                name: Optional[str] = None) -> str:
        """Run an action and store the result; returns the new id.

        Nothing is stored unless the action succeeds, so failures leave the
        workspace unchanged.
        """
        selections = selections or {}
        if len(operands) != 2:
            raise LLFlowError("composition takes exactly two operands")
        self._pending_anons = []
        try:
            left, _ = self._resolve_operand(operands[0])
            right, _ = self._resolve_operand(operands[1])
            comp_id = f"c{self._next_id + 1}"
            comp_name = name or comp_id
            if action == "tensor":
                comp = tensor_action(left, right, name=comp_name)
            elif action == "with":
                comp = with_action(
                    left,
                    _input_selection(left, selections, "input_p"),
                    right,
                    _input_selection(right, selections, "input_q"),
                    name=comp_name,
                )
            elif action == "join":
                sel_out = None
                if "priority" in selections and selections["priority"] is not None:
                    sel_out = Selection("output", path=tuple(selections["priority"]))
                sel_in = None
                if "input_q" in selections and selections["input_q"] is not None:
                    sel_in = Selection(
                        "input", index=_selection_index(right, selections["input_q"])
                    )
                comp = join_action(left, right, sel_out=sel_out, sel_in=sel_in, name=comp_name)
            else:
                raise LLFlowError(f"unknown action {action!r}")
        except Exception:
            self._pending_anons = []
            raise
        for spec in self._pending_anons:
            self.processes[spec.name] = spec
            self._next_anon += 1
        self._pending_anons = []
        self._next_id += 1
        self.compositions[comp_id] = comp
        self.revision += 1
        return comp_id

    def composition_summary(self, comp_id: str) -> dict:
        comp = self.compositions[comp_id]
        return {
            "id": comp_id,
            "name": comp.name,
            "spec": format_sequent(comp.spec.sequent()),
            "output": str(comp.spec.output),
            "inputs": [str(f) for f in comp.spec.inputs],
            "components": [c.name for c in comp.components],
            "rules": comp.proof.rule_count(),
            "verified": bool(verify(comp.proof, comp.component_map())),
        }

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "revision": self.revision,
            "next_id": self._next_id,
            "next_anon": self._next_anon,
            "processes": [
                {"name": s.name, "sequent": format_sequent(s.sequent())}
                for s in self.processes.values()
            ],
            "compositions": [
                {
                    "id": cid,
                    "name": c.name,
                    "components": [s.name for s in c.components],
                    "action_log": [
                        {
                            "action": r.action,
                            "operands": list(r.operands),
                            "params": [[k, v] for k, v in r.params],
                        }
                        for r in c.action_log
                    ],
                    "proof": proof_to_dict(c.proof),
                }
                for cid, c in self.compositions.items()
            ],
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "Workspace":
        version = data.get("version")
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"workspace format {version!r}, expected {FORMAT_VERSION}")
        ws = cls()
        for entry in data.get("processes", []):
            name = entry["name"]
            if name in ws.processes:
                raise ParseError(f"duplicate process name {name!r}")
            ws.processes[name] = validate_spec(name, parse_sequent(entry["sequent"]))
        for entry in data.get("compositions", []):
            cid = entry["id"]
            if cid in ws.compositions:
                raise ParseError(f"duplicate composition id {cid!r}")
            proof = proof_from_dict(entry["proof"], ws.processes)
            components = tuple(ws.processes[n] for n in entry["components"])
            log = tuple(
                ActionRecord(
                    r["action"],
                    tuple(r["operands"]),
                    tuple((k, v) for k, v in r["params"]),
                )
                for r in entry.get("action_log", [])
            )
            spec = validate_spec(entry.get("name", cid), proof.conclusion)
            ws.compositions[cid] = Composition(spec, proof, components, log)
        ws.revision = data.get("revision", 0)
        ws._next_id = data.get("next_id", len(ws.compositions))
        ws._next_anon = data.get("next_anon", 0)
        return ws

    @classmethod
    def load(cls, path: str) -> "Workspace":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid workspace file: {e}", position=e.pos) from None
        return cls.from_dict(data)


def _selection_index(operand: Composition, value) -> int:
    """An input selection is a canonical-order index or the input's text."""
    if isinstance(value, int):
        return value
    text = str(value)
    if text.lstrip("-").isdigit():
        return int(text)
    wanted = parse_sequent(text)
    if len(wanted) != 1:
        raise LLFlowError(f"input selection must be a single formula: {text!r}")
    target = wanted.formulas[0]
    for i, g in enumerate(operand.spec.inputs.formulas):
        if g is target:
            return i
    raise LLFlowError(f"{operand.name} has no input {text!r}")


def _input_selection(operand: Composition, selections: dict, key: str) -> Selection:
    value = selections.get(key)
    if value is None:
        if len(operand.spec.inputs) == 1:
            return Selection("input", index=0)
        raise LLFlowError(
            f"{key} is required: {operand.name} has {len(operand.spec.inputs)} inputs"
        )
    return Selection("input", index=_selection_index(operand, value))


def handle_compose(ws: Workspace, request: dict) -> dict:
    """Service-level compose: run, store, and describe the result.

    Request: ``{"action", "operands", "selections"?, "name"?}``.  The reply
    carries the stored spec, a proof summary, and the extracted workflow
    graph; on failure the workspace is left untouched and the error
    propagates with its machine-readable code.
    """
    comp_id = ws.compose(
        request["action"],
        request.get("operands", []),
        request.get("selections"),
        request.get("name"),
    )
    comp = ws.compositions[comp_id]
    graph = extract_graph(comp)
    return {
        "composition": ws.composition_summary(comp_id),
        "graph": graph.to_dict(),
        "revision": ws.revision,
    }
