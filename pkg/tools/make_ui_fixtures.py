"""Regenerate the frontend test fixtures from the engine.

Writes, under frontend/fixtures/:
  drug_request.json   -- the compose request the composer must emit for the
                         drug-delivery join gesture
  drug_response.json  -- the service reply for that request (summary + graph)
  cli_golden.json     -- the composition the CLI golden path stores, for the
                         round-trip comparison
  specs.json          -- the two stored process specs as the service lists them
  row5_graph.json     -- graph of the buffered-optional fixture (sequential
                         golden row 5), exercising triangles in the renderer
"""

import json
import os

from llflow.fixtures import DRUG_DELIVERY, DRUG_REASSESS, SEQUENTIAL_GOLDEN, run_sequential_row
from llflow.formulas import format_sequent
from llflow.graph import extract_graph
from llflow.workspace import Workspace, handle_compose

OUT = os.path.join(os.path.dirname(__file__), "..", "frontend", "fixtures")

DRUG_REQUEST = {
    "action": "join",
    "operands": ["DeliverDrug", "Reassess"],
    "selections": {"priority": ["right"], "input_q": "~Failed"},
    "name": None,
}


def main():
    os.makedirs(OUT, exist_ok=True)
    ws = Workspace()
    ws.add_process(*DRUG_DELIVERY)
    ws.add_process(*DRUG_REASSESS)
    specs = [
        {"name": s.name, "sequent": format_sequent(s.sequent())}
        for s in ws.processes.values()
    ]
    response = handle_compose(ws, dict(DRUG_REQUEST))

    cli_ws = Workspace()
    cli_ws.add_process(*DRUG_DELIVERY)
    cli_ws.add_process(*DRUG_REASSESS)
    cid = cli_ws.compose(
        "join", ["DeliverDrug", "Reassess"], {"priority": ["right"], "input_q": "~Failed"}
    )
    cli_golden = cli_ws.composition_summary(cid)

    row5, ok = run_sequential_row(SEQUENTIAL_GOLDEN[4])
    assert ok
    row5_graph = extract_graph(row5).to_dict()

    for name, data in [
        ("drug_request.json", DRUG_REQUEST),
        ("drug_response.json", response),
        ("cli_golden.json", cli_golden),
        ("specs.json", specs),
        ("row5_graph.json", row5_graph),
    ]:
        with open(os.path.join(OUT, name), "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
        print("wrote", name)


if __name__ == "__main__":
    main()
