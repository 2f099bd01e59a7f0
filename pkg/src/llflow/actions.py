"""High-level composition actions: parallel, conditional, and sequential.

Each action is a proof-producing procedure: it assembles a derivation from
the operands' proofs through the kernel and returns a :class:`Composition`
whose specification is the derivation's conclusion.  Nothing here can
produce an unsound result; at worst an action fails with a typed error.

* ``tensor_action``: one `times` application; inputs are pooled and the
  outputs are delivered in parallel.
* ``with_action``: conditional composition on two selected inputs.  The
  contexts of the two processes are minimally equalized by tensoring each
  side with a parallel buffer of the inputs it is missing, then the `with`
  rule combines them.  When the two adjusted outputs coincide (directly or
  through a filter) the combined output keeps that single shape; otherwise
  the result offers one output per branch.
* ``join_action``: sequential composition.  The receiving process is
  rewritten by :func:`input_tac` until it exposes an input that exactly
  matches the producing process's output, then a single cut connects them.

``input_tac`` synthesizes that matching input recursively: it matches
target subterms against available inputs (up to filters), buffers subterms
nobody consumes, fuses tensor factors with `par`, and closes optional
targets with an injection pair under `with`, preferring derivations that
keep the output minimal.  The ``priority`` path pins which occurrence of an
ambiguous subterm the user meant; the ``orient`` flag keeps buffered
resources on the same side of the output as in the original formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

from .errors import (
    DuplicateComponent,
    NoMatchingInput,
    PriorityUnmatchable,
    SelectionNotFound,
    SelectionNotInput,
)
from .formulas import (
    Formula,
    OUTPUT,
    Plus,
    ProcessSpec,
    Sequent,
    Tensor,
    dual,
    format_formula,
    mdiff,
    plus,
    tensor,
    validate_spec,
)
from .kernel import (
    ProofNode,
    apply_rule,
    leaf,
    rule_cut,
    rule_par,
    rule_plus_l,
    rule_plus_r,
    rule_times,
    rule_with,
    verify,
)
from .provers import SequentProver, buffer_tac, parbuf_tac, prove_filter, rproduct

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Selection:
    """A user selection inside a process specification.

    ``role`` is ``"input"`` (with ``index`` into the canonical input order)
    or ``"output"`` (with ``path``, a left/right descent into the output's
    syntax tree).  ``process`` optionally names the spec the selection was
    made against, for validation at the service boundary.
    """

    role: str
    index: Optional[int] = None
    path: Tuple[str, ...] = ()
    process: Optional[str] = None


@dataclass(frozen=True)
class ActionRecord:
    action: str
    operands: Tuple[str, str]
    params: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Composition:
    """A derived process: spec, the proof that built it, and its lineage."""

    spec: ProcessSpec
    proof: ProofNode
    components: Tuple[ProcessSpec, ...]
    action_log: Tuple[ActionRecord, ...] = ()

    @property
    def name(self) -> str:
        return self.spec.name

    def component_map(self) -> dict:
        return {c.name: c for c in self.components}

    def verify(self):
        return verify(self.proof, self.component_map())


Operand = Union[ProcessSpec, Composition]


def as_composition(x: Operand) -> Composition:
    if isinstance(x, Composition):
        return x
    return Composition(spec=x, proof=leaf(x), components=(x,))


def _merge_components(p: Composition, q: Composition) -> Tuple[ProcessSpec, ...]:
    clash = {c.name for c in p.components} & {c.name for c in q.components}
    if clash:
        raise DuplicateComponent(
            f"operands share component processes: {', '.join(sorted(clash))}"
        )
    return p.components + q.components


def _resolve_input(spec: ProcessSpec, sel: Selection) -> Formula:
    if sel.role != "input":
        raise SelectionNotInput(f"selection on {spec.name} must reference an input")
    if sel.index is None or not 0 <= sel.index < len(spec.inputs):
        raise SelectionNotFound(
            f"{spec.name} has no input with index {sel.index!r}"
        )
    return spec.inputs.formulas[sel.index]


def _validate_path(f: Formula, path: Sequence[str], name: str) -> None:
    cur = f
    for step in path:
        if step not in (LEFT, RIGHT) or not isinstance(cur, (Tensor, Plus)):
            raise SelectionNotFound(
                f"path {'/'.join(path)} does not address a subterm of {name}'s output"
            )
        cur = cur.l if step == LEFT else cur.r


# --------------------------------------------------------------------------
# TENSOR


def tensor_action(p: Operand, q: Operand, name: Optional[str] = None) -> Composition:
    """Parallel composition: pooled inputs, outputs delivered together."""
    P, Q = as_composition(p), as_composition(q)
    components = _merge_components(P, Q)
    proof = apply_rule(
        rule_times(P.spec.output, Q.spec.output, 0, 0), [P.proof, Q.proof]
    )
    spec = validate_spec(name or f"({P.name}*{Q.name})", proof.conclusion)
    record = ActionRecord("tensor", (P.name, Q.name))
    return Composition(spec, proof, components, P.action_log + Q.action_log + (record,))


# --------------------------------------------------------------------------
# WITH


def with_action(
    p: Operand,
    sel_p: Selection,
    q: Operand,
    sel_q: Selection,
    name: Optional[str] = None,
) -> Composition:
    """Conditional composition on selected inputs ``~X`` of p and ``~Y`` of q.

    Produces a process with input ``~(X+Y)``: whichever variant arrives
    selects the corresponding operand, and the inputs the other operand
    would have consumed are buffered through to its output so that no
    resource is silently dropped.
    """
    P, Q = as_composition(p), as_composition(q)
    components = _merge_components(P, Q)
    in_p = _resolve_input(P.spec, sel_p)
    in_q = _resolve_input(Q.spec, sel_q)
    x, y = dual(in_p), dual(in_q)

    ctx_p = P.spec.inputs.without(in_p)
    ctx_q = Q.spec.inputs.without(in_q)
    delta_p = mdiff(ctx_q, ctx_p)
    delta_q = mdiff(ctx_p, ctx_q)

    side_p, proof_p = _extend_with_buffers(P.proof, P.spec.output, delta_p)
    side_q, proof_q = _extend_with_buffers(Q.proof, Q.spec.output, delta_q)

    prover = SequentProver()
    if side_p == side_q:
        proof = apply_rule(rule_with(x, y, 0, 0), [proof_p, proof_q])
    else:
        filt = prove_filter(side_q, side_p, prover)
        if filt is not None:
            coerced = apply_rule(rule_cut(side_q, 0, 0), [proof_q, filt])
            proof = apply_rule(rule_with(x, y, 0, 0), [proof_p, coerced])
        else:
            left = apply_rule(rule_plus_l(side_p, side_q, 0), [proof_p])
            right = apply_rule(rule_plus_r(side_p, side_q, 0), [proof_q])
            proof = apply_rule(rule_with(x, y, 0, 0), [left, right])

    spec = validate_spec(name or f"({P.name}+{Q.name})", proof.conclusion)
    record = ActionRecord(
        "with",
        (P.name, Q.name),
        (("input_p", format_formula(in_p)), ("input_q", format_formula(in_q))),
    )
    return Composition(spec, proof, components, P.action_log + Q.action_log + (record,))


def _extend_with_buffers(proof: ProofNode, output: Formula, delta: Sequent):
    """Tensor a proof with a parallel buffer of the missing inputs."""
    if len(delta) == 0:
        return output, proof
    payloads = [dual(g) for g in delta]  # canonical order is inherited
    buf = parbuf_tac(payloads)
    prod = rproduct(payloads)
    extended = apply_rule(rule_times(output, prod, 0, 0), [proof, buf])
    return tensor(output, prod), extended


# --------------------------------------------------------------------------
# JOIN and the input-synthesis procedure


@dataclass(frozen=True)
class _Work:
    """Receiving process as it evolves: proof, current output, inputs
    still available for matching."""

    proof: ProofNode
    output: Formula
    avail: Tuple[Formula, ...]

    def consume(self, f: Formula) -> "_Work":
        rest = list(self.avail)
        rest.remove(f)
        return _Work(self.proof, self.output, tuple(rest))


def join_action(
    p: Operand,
    q: Operand,
    sel_out: Optional[Selection] = None,
    sel_in: Optional[Selection] = None,
    name: Optional[str] = None,
) -> Composition:
    """Sequential composition: q consumes the output of p.

    ``sel_out`` selects the subterm of p's output the user prioritizes (its
    path becomes the priority of the input synthesis); ``sel_in`` pins the
    input of q to match against.  Without selections the action auto-matches
    and fails with :class:`NoMatchingInput` when every candidate filter is
    unprovable.
    """
    P, Q = as_composition(p), as_composition(q)
    components = _merge_components(P, Q)
    target = P.spec.output

    priority: Tuple[str, ...] = ()
    if sel_out is not None:
        if sel_out.role != "output":
            raise SelectionNotFound(f"selection on {P.name} must reference the output")
        _validate_path(target, sel_out.path, P.name)
        priority = tuple(sel_out.path)
    sel_formula = _resolve_input(Q.spec, sel_in) if sel_in is not None else None

    state = _Work(Q.proof, Q.spec.output, Q.spec.inputs.formulas)
    prover = SequentProver()
    try:
        state = _input_tac(state, sel_formula, priority, LEFT, target, prover)
    except PriorityUnmatchable:
        if sel_out is None:
            raise NoMatchingInput(
                f"no input of {Q.name} matches the output {format_formula(target)} of {P.name}"
            ) from None
        raise

    proof = apply_rule(rule_cut(target, 0, 0), [P.proof, state.proof])
    spec = validate_spec(name or f"({P.name};{Q.name})", proof.conclusion)
    params = []
    if sel_out is not None:
        params.append(("priority", ",".join(sel_out.path)))
    if sel_in is not None:
        params.append(("input_q", format_formula(sel_formula)))
    record = ActionRecord("join", (P.name, Q.name), tuple(params))
    return Composition(spec, proof, components, P.action_log + Q.action_log + (record,))


def input_tac(
    sel: Optional[Formula],
    priority: Optional[Sequence[str]],
    orient: str,
    inputs: Iterable[Formula],
    target: Formula,
    proc: ProofNode,
) -> ProofNode:
    """Derive from ``proc`` a process with an input of type ``~target``.

    ``sel`` restricts matching to one chosen input formula; ``priority`` is
    the path of the user-selected subterm inside ``target`` (empty tuple:
    a match is required but anywhere; None: buffering the whole target is
    acceptable); ``orient`` says on which side buffered resources attach;
    ``inputs`` is the pool of inputs still available for matching.
    """
    spec = validate_spec("_q", proc.conclusion)
    state = _Work(proc, spec.output, Sequent(inputs).formulas)
    pr = None if priority is None else tuple(priority)
    result = _input_tac(state, sel, pr, orient, target, SequentProver())
    return result.proof


def _input_tac(
    st: _Work,
    sel: Optional[Formula],
    priority: Optional[Tuple[str, ...]],
    orient: str,
    target: Formula,
    prover: SequentProver,
) -> _Work:
    matched = _try_match(st, sel, target, prover)
    if matched is not None:
        return matched
    if isinstance(target, (Tensor, Plus)):
        return _composite(st, sel, priority, orient, target, prover)
    if priority is not None:
        raise PriorityUnmatchable(
            f"could not match the selected output subterm {format_formula(target)}"
        )
    return _attach_buffer(st, target, orient)


def _try_match(
    st: _Work, sel: Optional[Formula], target: Formula, prover: SequentProver
) -> Optional[_Work]:
    """Match the target against the selected input or the available pool.

    Exact duals need no proof step; otherwise a filter ``|- ~target, I``
    rewrites the candidate input ``~I`` into ``~target`` through a cut.
    Exact matches win over filter matches; remaining ties go to canonical
    formula order (the pool is kept sorted).
    """
    want = dual(target)
    if sel is not None:
        candidates = (sel,) if sel in st.avail else ()
    else:
        candidates = st.avail
    for cand in candidates:
        if cand is want:
            return st.consume(cand)
    tried = set()
    for cand in candidates:
        if cand is want or cand in tried:
            continue
        tried.add(cand)
        payload = dual(cand)
        if payload.pol != OUTPUT:
            continue
        filt = prove_filter(target, payload, prover)
        if filt is not None:
            proof = apply_rule(rule_cut(payload, 0, 0), [filt, st.proof])
            return _Work(proof, st.output, st.consume(cand).avail)
    return None


def _composite(
    st: _Work,
    sel: Optional[Formula],
    priority: Optional[Tuple[str, ...]],
    orient: str,
    target: Formula,
    prover: SequentProver,
) -> _Work:
    if priority:
        return _descend(st, sel, priority[0], priority[1:], orient, target, prover)
    for side in (LEFT, RIGHT):
        try:
            return _descend(st, sel, side, (), orient, target, prover)
        except PriorityUnmatchable:
            continue
    if priority is None:
        return _attach_buffer(st, target, orient)
    raise PriorityUnmatchable(
        f"could not match the selected output subterm {format_formula(target)}"
    )


def _descend(
    st: _Work,
    sel: Optional[Formula],
    side: str,
    rest: Tuple[str, ...],
    orient: str,
    target: Formula,
    prover: SequentProver,
) -> _Work:
    if side not in (LEFT, RIGHT):
        raise SelectionNotFound(f"invalid priority step {side!r}")
    first = target.l if side == LEFT else target.r
    second = target.r if side == LEFT else target.l
    st1 = _input_tac(st, sel, rest, orient, first, prover)
    if isinstance(target, Tensor):
        other_orient = RIGHT if side == LEFT else LEFT
        st2 = _input_tac(st1, None, None, other_orient, second, prover)
        fused = apply_rule(rule_par(target.l, target.r, 0, 0), [st2.proof])
        return _Work(fused, st2.output, st2.avail)
    return _close_optional(st1, target, side, first, second, prover)


def _close_optional(
    st: _Work,
    target: Formula,
    handled_side: str,
    handled: Formula,
    other: Formula,
    prover: SequentProver,
) -> _Work:
    """Synthesize ``~(L+R)`` after the chosen branch has been matched.

    First try to close with the output unchanged: if the rest of the
    process, the unhandled branch, and the current output form a provable
    pure lemma, the `with` rule applies directly and the result stays
    minimal (this covers both the plain parallel-buffer case and the case
    where the lemma lands in one side of an optional output).  Otherwise
    the general shape buffers the unhandled branch together with every
    other input, and the output becomes optional.
    """
    handled_neg = dual(handled)
    delta = st.proof.conclusion.without(st.output, handled_neg)

    lemma = prover.prove(delta.add(dual(other), st.output))
    if lemma is not None:
        if handled_side == LEFT:
            premises = [st.proof, lemma]
        else:
            premises = [lemma, st.proof]
        proof = apply_rule(rule_with(target.l, target.r, 0, 0), premises)
        return _Work(proof, st.output, st.avail)

    payloads = [dual(g) for g in delta] + [other]
    buf = parbuf_tac(payloads)
    buffered_side = rproduct(payloads)
    if handled_side == LEFT:
        new_out = plus(st.output, buffered_side)
        left = apply_rule(rule_plus_l(st.output, buffered_side, 0), [st.proof])
        right = apply_rule(rule_plus_r(st.output, buffered_side, 0), [buf])
    else:
        new_out = plus(buffered_side, st.output)
        left = apply_rule(rule_plus_l(buffered_side, st.output, 0), [buf])
        right = apply_rule(rule_plus_r(buffered_side, st.output, 0), [st.proof])
    proof = apply_rule(rule_with(target.l, target.r, 0, 0), [left, right])
    return _Work(proof, new_out, st.avail)


def _attach_buffer(st: _Work, f: Formula, orient: str) -> _Work:
    """Carry an unconsumed target through: tensor the process with its
    buffer, attaching on the side the target occupied in the original
    output."""
    buf = buffer_tac(f)
    if orient == RIGHT:
        proof = apply_rule(rule_times(st.output, f, 0, 0), [st.proof, buf])
        new_out = tensor(st.output, f)
    else:
        proof = apply_rule(rule_times(f, st.output, 0, 0), [buf, st.proof])
        new_out = tensor(f, st.output)
    return _Work(proof, new_out, st.avail)
