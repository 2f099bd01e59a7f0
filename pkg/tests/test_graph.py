"""Workflow extraction and token simulation."""

import pytest

from llflow.actions import as_composition, tensor_action
from llflow.errors import UnresolvedChoice
from llflow.fixtures import (
    CONDITIONAL_GOLDEN,
    SEQUENTIAL_GOLDEN,
    drug_composition,
    run_conditional_row,
    run_sequential_row,
    spec_of,
)
from llflow.graph import (
    choice_points,
    enumerate_choices,
    extract_graph,
    simulate,
    simulate_all,
)
from conftest import random_chain


def test_tensor_graph_shape():
    comp = tensor_action(spec_of("p", "~A, ~C, D"), spec_of("q", "~B, E"))
    g = extract_graph(comp)
    g.validate()
    assert len(g.process_nodes()) == 2
    assert sum(1 for n in g.nodes if n.kind == "split") == 1
    assert g.cut_edges() == []


def test_single_spec_graph():
    comp = as_composition(spec_of("solo", "~A, ~B, A*B"))
    g = extract_graph(comp)
    g.validate()
    assert len(g.process_nodes()) == 1
    assert [str(f) for f, _, _ in g.boundary_inputs] == ["A", "B"]
    assert str(g.boundary_output) == "A*B"
    rep = simulate(g)
    assert rep.completed and rep.step_count == 1
    assert rep.produced == {"A": 1, "B": 1}


def test_drug_graph_structure():
    comp = drug_composition()
    g = extract_graph(comp)
    g.validate()
    assert len(g.process_nodes()) == 2
    cuts = g.cut_edges()
    assert len(cuts) == 1
    assert str(cuts[0].formula) == "Treated+Failed"
    buffers = {n.label for n in g.nodes if n.kind == "buffer"}
    assert "ClinTime" in buffers
    assert any(n.kind == "merge" and n.role == "case" for n in g.nodes)
    # boundary matches the composition spec
    assert sorted(str(f) for f, _, _ in g.boundary_inputs) == [
        "ClinTime",
        "Dosage",
        "NurseTime",
        "Patient",
    ]
    assert str(g.boundary_output) == "ClinTime*Treated+Reassessed"


def test_drug_simulation_failure_branch():
    g = extract_graph(drug_composition())
    reports = {  # keyed by the branch the delivery takes
        rep.branch_choices["DeliverDrug"]: rep for rep in simulate_all(g)
    }
    fail = reports["right(Failed)"]
    assert fail.completed
    assert fail.consumed == {"Patient": 1, "Dosage": 1, "NurseTime": 1, "ClinTime": 1}
    assert fail.produced == {"Reassessed": 1}
    ok = reports["left(Treated)"]
    assert ok.completed
    assert ok.consumed == fail.consumed
    assert ok.produced == {"Treated": 1, "ClinTime": 1}


def test_simulate_with_explicit_choice():
    g = extract_graph(drug_composition())
    rep = simulate(g, {"DeliverDrug": "right"})
    assert rep.produced == {"Reassessed": 1}


def test_unresolved_choice_raises():
    g = extract_graph(drug_composition())
    with pytest.raises(UnresolvedChoice):
        simulate(g, {})
    with pytest.raises(UnresolvedChoice):
        simulate(g, {"DeliverDrug": "right", "ghost": "left"})


def test_choice_points_and_enumeration():
    g = extract_graph(drug_composition())
    points = choice_points(g)
    assert "DeliverDrug" in points
    assert len(enumerate_choices(g)) == 2  # only the delivery output branches


def test_all_golden_fixture_graphs_extract_and_simulate():
    comps = [run_conditional_row(r)[0] for r in CONDITIONAL_GOLDEN]
    comps += [run_sequential_row(r)[0] for r in SEQUENTIAL_GOLDEN]
    for comp in comps:
        g = extract_graph(comp)
        g.validate()
        boundary = sorted(str(f) for f, _, _ in g.boundary_inputs)
        spec_inputs = sorted(str(d) for d in dual_inputs(comp))
        assert boundary == spec_inputs
        check_exhaustively(g, comp.name)


def dual_inputs(comp):
    from llflow.formulas import dual

    return [dual(f) for f in comp.spec.inputs]


def check_exhaustively(g, name):
    """Every branch resolution completes and conserves exactly the atoms of
    the resolved boundary-input values."""
    from llflow.graph import simulate, enumerate_choices, value_atoms

    input_ids = {nid for _, nid, _ in g.boundary_inputs}
    all_choices = enumerate_choices(g)
    assert all_choices
    for choices in all_choices:
        rep = simulate(g, choices)
        assert rep.completed, f"stranded tokens in {name}"
        expected = {}
        for key, value in choices.items():
            if key in input_ids:
                for atom_name, k in value_atoms(value).items():
                    expected[atom_name] = expected.get(atom_name, 0) + k
        assert rep.consumed == expected
        assert rep.produced == value_atoms(rep.output_value)
    return len(all_choices)


def test_random_chain_graphs_complete(rng):
    for i in range(15):
        comp = random_chain(rng, rng.randint(2, 6), f"g{i}")
        g = extract_graph(comp)
        g.validate()
        check_exhaustively(g, comp.name)


def test_dot_rendering_marks_optional_edges():
    g = extract_graph(drug_composition())
    dot = g.to_dot()
    assert "digraph" in dot and "style=dashed" in dot
    assert 'shape=box, label="DeliverDrug"' in dot


def test_graph_serialization():
    g = extract_graph(drug_composition())
    d = g.to_dict()
    assert d["boundary"]["output"] == "ClinTime*Treated+Reassessed"
    kinds = {n["kind"] for n in d["nodes"]}
    assert {"process", "buffer", "split", "merge", "input", "output"} <= kinds
    assert any(e["cut"] for e in d["edges"])
    assert any(e["optional"] for e in d["edges"])
