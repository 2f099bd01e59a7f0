"""llflow: correct-by-construction process composition.

Processes are specified as polarity-restricted linear-logic sequents (a
multiset of inputs and a single output).  Compositions are built by
proof-producing actions through a small verified kernel, and every result
carries its derivation.  Workflow graphs extracted from the proofs can be
token-simulated to check deadlock freedom and resource accounting.
"""

from .actions import (
    Composition,
    Selection,
    input_tac,
    join_action,
    tensor_action,
    with_action,
)
from .errors import LLFlowError
from .formulas import (
    Formula,
    ProcessSpec,
    Sequent,
    atom,
    dual,
    format_formula,
    format_sequent,
    mdiff,
    natom,
    parse_formula,
    parse_sequent,
    plus,
    polarity,
    tensor,
    validate_spec,
)
from .graph import WorkflowGraph, extract_graph, simulate, simulate_all
from .kernel import ProofNode, apply_rule, leaf, verify
from .provers import (
    ProvabilityOracle,
    SequentProver,
    buffer_tac,
    parbuf_tac,
    prove_filter,
    provable_oracle,
)
from .workspace import Workspace, handle_compose

__version__ = "0.1.0"

__all__ = [
    "Composition",
    "Formula",
    "LLFlowError",
    "ProcessSpec",
    "ProofNode",
    "ProvabilityOracle",
    "Selection",
    "Sequent",
    "SequentProver",
    "WorkflowGraph",
    "Workspace",
    "apply_rule",
    "atom",
    "buffer_tac",
    "dual",
    "extract_graph",
    "format_formula",
    "format_sequent",
    "handle_compose",
    "input_tac",
    "join_action",
    "leaf",
    "mdiff",
    "natom",
    "parbuf_tac",
    "parse_formula",
    "parse_sequent",
    "plus",
    "polarity",
    "prove_filter",
    "provable_oracle",
    "simulate",
    "simulate_all",
    "tensor",
    "tensor_action",
    "validate_spec",
    "verify",
    "with_action",
]
