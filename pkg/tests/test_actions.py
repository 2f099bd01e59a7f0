"""Composition actions against the golden tables and their invariants."""

import random

import pytest

from llflow.actions import Selection, join_action, tensor_action, with_action
from llflow.errors import (
    DuplicateComponent,
    NoMatchingInput,
    PriorityUnmatchable,
    SelectionNotFound,
    SelectionNotInput,
)
from llflow.fixtures import (
    CONDITIONAL_GOLDEN,
    DRUG_EXPECTED,
    INPUT_SYNTHESIS_GOLDEN,
    SEQUENTIAL_GOLDEN,
    drug_composition,
    input_selection,
    run_conditional_row,
    run_input_synthesis_row,
    run_sequential_row,
    spec_of,
)
from llflow.formulas import Sequent, format_sequent, parse_sequent
from llflow.kernel import leaf, verify
from conftest import random_chain


# -- tensor ---------------------------------------------------------------


def test_tensor_pools_inputs():
    c = tensor_action(spec_of("p", "~A, ~C, D"), spec_of("q", "~B, E"))
    assert c.spec.sequent() == parse_sequent("~A, ~B, ~C, D*E")
    assert c.verify()


def test_tensor_simple():
    c = tensor_action(spec_of("p", "~A, X"), spec_of("q", "~B, Y"))
    assert c.spec.sequent() == parse_sequent("~A, ~B, X*Y")


def test_tensor_no_inputs():
    c = tensor_action(spec_of("p", "X"), spec_of("q", "Y"))
    assert c.spec.sequent() == parse_sequent("X*Y")
    assert len(c.spec.inputs) == 0


def test_duplicate_component_rejected():
    p = spec_of("p", "~A, X")
    with pytest.raises(DuplicateComponent):
        tensor_action(p, p)


# -- golden tables -----------------------------------------------------------


@pytest.mark.parametrize("row", CONDITIONAL_GOLDEN, ids=lambda r: r[0] + "|" + r[2])
def test_conditional_golden_row(row):
    comp, ok = run_conditional_row(row)
    assert ok, f"got |- {format_sequent(comp.spec.sequent())}, want |- {row[-1]}"
    assert comp.verify()


@pytest.mark.parametrize("row", SEQUENTIAL_GOLDEN, ids=lambda r: f"{r[0]}|{r[1]}|{r[2]}")
def test_sequential_golden_row(row):
    comp, ok = run_sequential_row(row)
    assert ok, f"got |- {format_sequent(comp.spec.sequent())}, want |- {row[-1]}"
    assert comp.verify()


@pytest.mark.parametrize("row", INPUT_SYNTHESIS_GOLDEN, ids=lambda r: f"{r[0]}|{r[1]}")
def test_input_synthesis_golden_row(row):
    node, ok = run_input_synthesis_row(row)
    assert ok, f"got |- {format_sequent(node.conclusion)}, want |- {row[-1]}"


def test_minimal_optional_result_not_duplicated():
    """Sequencing an optional output into a recovery process must not grow
    a redundant second branch of the same type."""
    comp, ok = run_sequential_row(("~X, A+B", "l", "~A, B", "~A", "~X, B"))
    assert ok
    assert str(comp.spec.output) == "B"


def test_parallel_output_connects_maximally():
    p = spec_of("p", "~A, ~D, B*C")
    q = spec_of("q", "~B, ~C, ~E, Y")
    comp = join_action(p, q)
    assert comp.spec.sequent() == parse_sequent("~A, ~D, ~E, Y")
    assert comp.verify()


def test_drug_workflow_output():
    comp = drug_composition()
    assert comp.spec.sequent() == parse_sequent(DRUG_EXPECTED)
    assert str(comp.spec.output) == "ClinTime*Treated+Reassessed"
    assert comp.verify()


# -- selection and failure behavior ----------------------------------------------


def test_join_auto_match_failure():
    p = spec_of("p", "~A, B")
    q = spec_of("q", "~C, ~D, E")
    with pytest.raises(NoMatchingInput):
        join_action(p, q)


def test_join_priority_unmatchable_surfaces_and_retry_without_priority_works():
    p = spec_of("p", "~X, A*B")
    q = spec_of("q", "~B, Y")
    with pytest.raises(PriorityUnmatchable):
        join_action(p, q, sel_out=Selection("output", path=("left",)))
    # caller retries without the bad priority and the action succeeds
    comp = join_action(p, q)
    assert comp.spec.sequent() == parse_sequent("~X, A*Y")
    assert comp.verify()


def test_selection_validation():
    p = spec_of("p", "~X, A")
    q = spec_of("q", "~A, Y")
    with pytest.raises(SelectionNotFound):
        join_action(p, q, sel_out=Selection("output", path=("left",)))
    with pytest.raises(SelectionNotFound):
        join_action(p, q, sel_in=Selection("input", index=5))
    with pytest.raises(SelectionNotFound):
        join_action(p, q, sel_out=Selection("input", index=0))
    with pytest.raises(SelectionNotInput):
        with_action(p, Selection("output"), q, Selection("input", index=0))


def test_join_respects_selected_input():
    # two candidate inputs of the same type: the selection pins which one
    p = spec_of("p", "~X, A")
    q = spec_of("q", "~A, ~A, Y")
    comp = join_action(p, q, sel_in=Selection("input", index=1))
    assert comp.spec.sequent() == parse_sequent("~X, ~A, Y")
    assert comp.verify()


def test_with_requires_input_selection_on_inputs():
    p = spec_of("p", "~X, Z")
    q = spec_of("q", "~Y, Z")
    comp = with_action(p, Selection("input", index=0), q, Selection("input", index=0))
    assert comp.spec.sequent() == parse_sequent("~(X+Y), Z")


# -- determinism and resource accounting --------------------------------------------


def test_actions_are_deterministic():
    rows = [CONDITIONAL_GOLDEN[4], CONDITIONAL_GOLDEN[7]]
    for row in rows:
        c1, _ = run_conditional_row(row)
        c2, _ = run_conditional_row(row)
        assert c1.proof == c2.proof
        assert c1.spec == c2.spec
    s1, _ = run_sequential_row(SEQUENTIAL_GOLDEN[8])
    s2, _ = run_sequential_row(SEQUENTIAL_GOLDEN[8])
    assert s1.proof == s2.proof


def _atom_count(sequent):
    return sequent.atom_occurrences()


def test_join_resource_accounting():
    """Atoms of the result = atoms of the two cut premises minus the pair
    of cut-formula occurrences: nothing appears, nothing vanishes."""
    p = spec_of("p", "~X, A+B")
    q = spec_of("q", "~A, ~C, Y")
    comp = join_action(p, q, sel_out=Selection("output", path=("left",)),
                       sel_in=Selection("input", index=0))
    assert comp.proof.rule.tag == "cut"
    left, right = comp.proof.premises
    total = {}
    for s in (left.conclusion, right.conclusion):
        for name, k in _atom_count(s).items():
            total[name] = total.get(name, 0) + k
    cut_atoms = Sequent([comp.proof.rule.a]).atom_occurrences()
    for name, k in cut_atoms.items():
        total[name] -= 2 * k
    got = _atom_count(comp.spec.sequent())
    assert got == {n: k for n, k in total.items() if k}


def test_composition_components_and_log():
    comp = drug_composition()
    assert {c.name for c in comp.components} == {"DeliverDrug", "Reassess"}
    assert [r.action for r in comp.action_log] == ["join"]
    assert comp.proof.leaf_processes() == {"DeliverDrug", "Reassess"}


def test_chained_compositions_compose():
    first = drug_composition()
    follow = spec_of("Archive", "~Reassessed, Done")
    second = join_action(
        first,
        follow,
        sel_out=Selection("output", path=("right",)),
        sel_in=Selection("input", index=0),
    )
    assert second.verify()
    assert str(second.spec.output) == "ClinTime*Treated+Done"
    assert {c.name for c in second.components} == {"DeliverDrug", "Reassess", "Archive"}


def test_random_chains_all_verify(rng):
    for i in range(40):
        comp = random_chain(rng, rng.randint(2, 8), f"t{i}")
        assert comp.verify(), f"chain {i} failed verification"
