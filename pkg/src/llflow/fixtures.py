"""Golden composition examples used as the engine's regression suite.

Three tables of expected results, written in the text syntax:

* ``CONDITIONAL_GOLDEN``: conditional composition between the ``~X`` input
  of P and the ``~Y`` input of Q; rows cover shared/missing/duplicated
  contexts and the filter-mediated single-output special cases.
* ``SEQUENTIAL_GOLDEN``: sequential composition with a priority path into
  P's output and a selected input of Q; rows cover direct cuts, buffered
  tensor factors, optional outputs, and filter-mediated matches, including
  the minimal-output cases where the result must not grow a redundant
  optional branch.
* ``INPUT_SYNTHESIS_GOLDEN``: direct input-synthesis cases showing how the
  priority path changes which occurrence of an ambiguous subterm is
  connected.

The drug-delivery pair at the bottom is the end-to-end example: delivery
either treats the patient or fails, and the failure branch is handled by a
reassessment that consumes reserved clinician time; the composed output
couples the unused clinician time with the success branch.
"""

from __future__ import annotations

from typing import Iterator, Optional, Tuple

from .actions import Composition, Selection, join_action, with_action
from .formulas import ProcessSpec, parse_formula, parse_sequent, validate_spec
from .kernel import ProofNode, leaf
from .actions import input_tac

# (P sequent, P selected input, Q sequent, Q selected input, expected result)
CONDITIONAL_GOLDEN: Tuple[Tuple[str, str, str, str, str], ...] = (
    ("~X, Z", "~X", "~Y, Z", "~Y", "~(X+Y), Z"),
    ("~X, Z", "~X", "~Y, W", "~Y", "~(X+Y), Z+W"),
    ("~X, ~A, ~B, Z", "~X", "~Y, Z", "~Y", "~(X+Y), ~A, ~B, Z+Z*(A*B)"),
    ("~X, ~A, Z", "~X", "~Y, ~B, W", "~Y", "~(X+Y), ~A, ~B, Z*B+W*A"),
    ("~X, ~A, ~C, Z", "~X", "~Y, ~B, W", "~Y", "~(X+Y), ~A, ~B, ~C, Z*B+W*(A*C)"),
    ("~X, ~A, ~C, Z", "~X", "~Y, ~B, ~C, W", "~Y", "~(X+Y), ~A, ~B, ~C, Z*B+W*A"),
    ("~X, ~A, ~C, ~C, Z", "~X", "~Y, ~B, ~C, W", "~Y", "~(X+Y), ~A, ~B, ~C, ~C, Z*B+W*(A*C)"),
    ("~X, A*B", "~X", "~Y, B*A", "~Y", "~(X+Y), A*B"),
    ("~X, ~A, Z*A", "~X", "~Y, Z", "~Y", "~(X+Y), ~A, Z*A"),
    ("~X, ~A, A*Z", "~X", "~Y, Z", "~Y", "~(X+Y), ~A, A*Z"),
    ("~X, ~A, Z+Z*A", "~X", "~Y, Z", "~Y", "~(X+Y), ~A, Z+Z*A"),
)

# (P sequent, priority, Q sequent, Q selected input, expected result)
SEQUENTIAL_GOLDEN: Tuple[Tuple[str, str, str, str, str], ...] = (
    ("~X, A", "", "~A, Y", "~A", "~X, Y"),
    ("~X, A*B", "l", "~A, Y", "~A", "~X, Y*B"),
    ("~X, A+B", "l", "~A, B", "~A", "~X, B"),
    ("~X, A*B*C", "l", "~A, Y", "~A", "~X, Y*B*C"),
    ("~X, A+B", "l", "~A, ~C, Y", "~A", "~X, ~C, Y+C*B"),
    ("~X, A+B", "r", "~B, ~C, Y", "~B", "~X, ~C, C*A+Y"),
    ("~X, A+B", "l", "~(B+A), Y", "~(B+A)", "~X, Y"),
    ("~X, A+(B*C)", "l", "~(B+A), Y", "~(B+A)", "~X, Y+B*C"),
    ("~X, A+(B*C)", "rl", "~(B+A), Y", "~(B+A)", "~X, A+Y*C"),
    ("~X, A+B", "l", "~(C+A+D), Y", "~(C+A+D)", "~X, Y+B"),
    ("~X, C+(A*B)", "l", "~C, A*B", "~C", "~X, A*B"),
    ("~X, C+(A*B)", "l", "~C, B*A", "~C", "~X, B*A"),
    ("~X, C+(A*(B+D))", "l", "~C, (B+D)*A", "~C", "~X, (B+D)*A"),
    ("~X, C+(A*B)", "l", "~C, Y+B*A", "~C", "~X, Y+B*A"),
    ("~X, C+(A*B)", "l", "~C, B*A+Y", "~C", "~X, B*A+Y"),
    ("~X, (A*B)+C", "r", "~C, Y+B*A", "~C", "~X, Y+B*A"),
    ("~X, (A*B)+C", "r", "~C, B*A+Y", "~C", "~X, B*A+Y"),
    ("~X, C+(A*B)", "l", "~C, Y+B*A", "~C", "~X, Y+B*A"),
)

# (target, priority, Q sequent, expected derived sequent)
INPUT_SYNTHESIS_GOLDEN: Tuple[Tuple[str, str, str, str], ...] = (
    ("A*(A+B)", "l", "~A, Y", "~(A*(A+B)), Y*(A+B)"),
    ("A*(A+B)", "rl", "~A, Y", "~(A*(A+B)), A*(Y+B)"),
    ("A+(B*C)", "l", "~(B+A), Y", "~(A+(B*C)), Y+B*C"),
    ("A+(B*C)", "rl", "~(B+A), Y", "~(A+(B*C)), A+Y*C"),
)

DRUG_DELIVERY = ("DeliverDrug", "~Patient, ~Dosage, ~NurseTime, Treated+Failed")
DRUG_REASSESS = ("Reassess", "~Failed, ~ClinTime, Reassessed")
DRUG_EXPECTED = "~Patient, ~Dosage, ~NurseTime, ~ClinTime, ClinTime*Treated+Reassessed"


def spec_of(name: str, text: str) -> ProcessSpec:
    return validate_spec(name, parse_sequent(text))


def input_selection(spec: ProcessSpec, text: str, process: Optional[str] = None) -> Selection:
    """Selection of a whole input, located by its text form."""
    wanted = parse_formula(text)
    for i, g in enumerate(spec.inputs.formulas):
        if g is wanted:
            return Selection("input", index=i, process=process or spec.name)
    raise KeyError(f"{spec.name} has no input {text}")


def priority_path(compact: str) -> Tuple[str, ...]:
    steps = {"l": "left", "r": "right"}
    return tuple(steps[ch] for ch in compact)


def run_conditional_row(row) -> Tuple[Composition, bool]:
    p_text, p_sel, q_text, q_sel, expected = row
    p = spec_of("P", p_text)
    q = spec_of("Q", q_text)
    comp = with_action(p, input_selection(p, p_sel), q, input_selection(q, q_sel))
    return comp, comp.spec.sequent() == parse_sequent(expected)


def run_sequential_row(row) -> Tuple[Composition, bool]:
    p_text, pr, q_text, q_sel, expected = row
    p = spec_of("P", p_text)
    q = spec_of("Q", q_text)
    sel_out = Selection("output", path=priority_path(pr)) if pr else None
    comp = join_action(p, q, sel_out=sel_out, sel_in=input_selection(q, q_sel))
    want = validate_spec("expected", parse_sequent(expected))
    ok = comp.spec.sequent() == want.sequent() and comp.spec.output is want.output
    return comp, ok


def run_input_synthesis_row(row) -> Tuple[ProofNode, bool]:
    target, pr, q_text, expected = row
    q = spec_of("Q", q_text)
    node = input_tac(None, priority_path(pr), "left", q.inputs, parse_formula(target), leaf(q))
    return node, node.conclusion == parse_sequent(expected)


def drug_composition() -> Composition:
    p = spec_of(*DRUG_DELIVERY)
    q = spec_of(*DRUG_REASSESS)
    return join_action(
        p,
        q,
        sel_out=Selection("output", path=("right",), process=p.name),
        sel_in=input_selection(q, "~Failed"),
        name="DrugWorkflow",
    )


def iter_selftest() -> Iterator[Tuple[str, bool, str]]:
    """Yield (case name, passed, detail) over every golden row."""
    for i, row in enumerate(CONDITIONAL_GOLDEN, 1):
        comp, ok = run_conditional_row(row)
        yield f"conditional {i:2}", ok and bool(comp.verify()), str(comp.spec)
    for i, row in enumerate(SEQUENTIAL_GOLDEN, 1):
        comp, ok = run_sequential_row(row)
        yield f"sequential {i:2}", ok and bool(comp.verify()), str(comp.spec)
    for i, row in enumerate(INPUT_SYNTHESIS_GOLDEN, 1):
        node, ok = run_input_synthesis_row(row)
        yield f"input-synth {i:2}", ok, str(node.conclusion)
    comp = drug_composition()
    ok = comp.spec.sequent() == parse_sequent(DRUG_EXPECTED) and bool(comp.verify())
    yield "drug workflow", ok, str(comp.spec)
