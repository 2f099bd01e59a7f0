"""HTTP API over a workspace, for the browser composer and for scripting.

Endpoints:

* ``GET  /processes``                     -- list stored specs
* ``POST /processes``                    -- ``{"name", "sequent"}``
* ``POST /compose``                      -- ``{"action", "operands", "selections"?, "name"?}``
* ``GET  /compositions``                 -- list stored compositions
* ``GET  /compositions/{id}``            -- spec summary
* ``GET  /compositions/{id}/graph``      -- extracted workflow graph
* ``GET  /compositions/{id}/proof``      -- serialized derivation
* ``POST /compositions/{id}/simulate``   -- ``{"choices"?}``; omitted choices
  run the exhaustive branch simulation

Errors carry machine-readable codes (``{"code", "message"}``).  Mutations
are serialized through a single writer lock; reads are lock-free over the
immutable stored objects.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import LLFlowError
from .formulas import format_sequent
from .graph import extract_graph, simulate, simulate_all
from .kernel import proof_to_dict
from .workspace import Workspace, handle_compose


class ProcessIn(BaseModel):
    name: str
    sequent: str


class ComposeIn(BaseModel):
    action: str
    operands: list
    selections: Optional[dict] = None
    name: Optional[str] = None


class SimulateIn(BaseModel):
    choices: Optional[dict] = None


def create_app(workspace: Optional[Workspace] = None) -> FastAPI:
    app = FastAPI(title="llflow", version="0.1.0")
    app.state.workspace = workspace if workspace is not None else Workspace()
    app.state.write_lock = threading.Lock()

    @app.exception_handler(LLFlowError)
    async def _engine_error(request: Request, exc: LLFlowError):
        status = 404 if exc.code == "unknown_process" else 422
        return JSONResponse(status_code=status, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(KeyError)
    async def _missing(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"code": "not_found", "message": str(exc)})

    def ws() -> Workspace:
        return app.state.workspace

    @app.get("/processes")
    def list_processes():
        return {
            "revision": ws().revision,
            "processes": [
                {"name": s.name, "sequent": format_sequent(s.sequent())}
                for s in ws().processes.values()
            ],
        }

    @app.post("/processes")
    def add_process(body: ProcessIn):
        with app.state.write_lock:
            spec = ws().add_process(body.name, body.sequent)
        return {
            "name": spec.name,
            "sequent": format_sequent(spec.sequent()),
            "revision": ws().revision,
        }

    @app.post("/compose")
    def compose(body: ComposeIn):
        with app.state.write_lock:
            return handle_compose(ws(), body.model_dump())

    @app.get("/compositions")
    def list_compositions():
        return {
            "revision": ws().revision,
            "compositions": [ws().composition_summary(cid) for cid in ws().compositions],
        }

    @app.get("/compositions/{comp_id}")
    def get_composition(comp_id: str):
        return ws().composition_summary(comp_id)

    @app.get("/compositions/{comp_id}/graph")
    def get_graph(comp_id: str):
        comp = ws().compositions[comp_id]
        return extract_graph(comp).to_dict()

    @app.get("/compositions/{comp_id}/proof")
    def get_proof(comp_id: str):
        comp = ws().compositions[comp_id]
        return {"id": comp_id, "proof": proof_to_dict(comp.proof)}

    @app.post("/compositions/{comp_id}/simulate")
    def run_simulation(comp_id: str, body: SimulateIn):
        comp = ws().compositions[comp_id]
        graph = extract_graph(comp)
        if body.choices:
            reports = [simulate(graph, _parse_choices(body.choices))]
        else:
            reports = simulate_all(graph)
        return {"id": comp_id, "reports": [r.to_dict() for r in reports]}

    return app


def _parse_choices(choices: dict) -> dict:
    out = {}
    for key, value in choices.items():
        if isinstance(value, list):
            value = _to_value(value)
        out[key] = value
    return out


def _to_value(v):
    if isinstance(v, list):
        return tuple(_to_value(x) for x in v)
    return v


app = create_app()
