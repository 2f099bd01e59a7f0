"""Derivation trees and checked rule application.

This is the trusted core: every composition the engine produces is a
:class:`ProofNode` tree built exclusively through :func:`apply_rule`, and
:func:`verify` re-derives every node's conclusion from its premises, so a
verified tree cannot claim anything the seven rules do not license.

The rule set (one-sided, multiplicative-additive, no units):

====== ========= ==========================================================
tag    premises  conclusion
====== ========= ==========================================================
id     --        |- ~A, A                      (A atomic)
cut    2         |- G, D        from |- G, C and |- D, ~C
times  2         |- G, D, A*B   from |- G, A and |- D, B
par    1         |- G, ~(A*B)   from |- G, ~A, ~B
plus_l 1         |- G, A+B      from |- G, A
plus_r 1         |- G, A+B      from |- G, B
with   2         |- G, ~(A+B)   from |- G, ~A and |- G, ~B  (same G!)
====== ========= ==========================================================

Leaves are either ``id`` axioms or named component processes taken as
hypotheses, which makes every composition a derivation from the component
specifications.

Sequents are multisets, so a principal formula occurring with multiplicity
needs a disambiguating occurrence index (canonical multiset order); the
index never changes the conclusion, it resolves which copy a workflow edge
attaches to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import AmbiguousSelection, ContextMismatch, SchemaMismatch
from .formulas import (
    Atom,
    Formula,
    ProcessSpec,
    Sequent,
    dual,
    format_formula,
    format_sequent,
    parse_formula,
    plus,
    tensor,
)

ID = "id"
CUT = "cut"
TIMES = "times"
PAR = "par"
PLUS_L = "plus_l"
PLUS_R = "plus_r"
WITH = "with"

_ARITY = {ID: 0, CUT: 2, TIMES: 2, PAR: 1, PLUS_L: 1, PLUS_R: 1, WITH: 2}


@dataclass(frozen=True)
class Rule:
    """A rule tag with enough parameters to recheck the application.

    ``a``/``b`` are the principal formulas (for ``id`` and ``cut`` only
    ``a`` is used); ``occ_a``/``occ_b`` are occurrence indices in canonical
    multiset order, required whenever the principal occurs more than once.
    """

    tag: str
    a: Optional[Formula] = None
    b: Optional[Formula] = None
    occ_a: Optional[int] = None
    occ_b: Optional[int] = None

    def __str__(self):
        parts = [self.tag]
        if self.a is not None:
            parts.append(format_formula(self.a))
        if self.b is not None:
            parts.append(format_formula(self.b))
        return f"{parts[0]}({', '.join(parts[1:])})"


def rule_id(a: Formula) -> Rule:
    return Rule(ID, a)


def rule_cut(c: Formula, occ_pos: Optional[int] = None, occ_neg: Optional[int] = None) -> Rule:
    return Rule(CUT, c, None, occ_pos, occ_neg)


def rule_times(a: Formula, b: Formula, occ_a: Optional[int] = None, occ_b: Optional[int] = None) -> Rule:
    return Rule(TIMES, a, b, occ_a, occ_b)


def rule_par(a: Formula, b: Formula, occ_a: Optional[int] = None, occ_b: Optional[int] = None) -> Rule:
    return Rule(PAR, a, b, occ_a, occ_b)


def rule_plus_l(a: Formula, b: Formula, occ: Optional[int] = None) -> Rule:
    return Rule(PLUS_L, a, b, occ)


def rule_plus_r(a: Formula, b: Formula, occ: Optional[int] = None) -> Rule:
    return Rule(PLUS_R, a, b, None, occ)


def rule_with(a: Formula, b: Formula, occ_a: Optional[int] = None, occ_b: Optional[int] = None) -> Rule:
    return Rule(WITH, a, b, occ_a, occ_b)


@dataclass(frozen=True)
class ProofNode:
    """One node of a derivation tree.

    Exactly one of ``rule`` / ``process`` is set: rule nodes carry their
    premises, process leaves name the component hypothesis they stand for.
    """

    conclusion: Sequent
    rule: Optional[Rule]
    premises: tuple
    process: Optional[str] = None

    def is_leaf_process(self) -> bool:
        return self.process is not None

    def walk(self) -> Iterator["ProofNode"]:
        """Post-order traversal, iterative to survive deep compositions."""
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                yield node
            else:
                stack.append((node, True))
                for p in reversed(node.premises):
                    stack.append((p, False))

    def leaf_processes(self) -> set:
        return {n.process for n in self.walk() if n.process is not None}

    def rule_count(self) -> dict:
        counts: dict = {}
        for n in self.walk():
            tag = n.rule.tag if n.rule else "process"
            counts[tag] = counts.get(tag, 0) + 1
        return counts

    def depth(self) -> int:
        depths: dict = {}
        for n in self.walk():
            depths[id(n)] = 1 + max((depths[id(p)] for p in n.premises), default=0)
        return depths[id(self)]


def leaf(spec: ProcessSpec) -> ProofNode:
    """A component process taken as a hypothesis."""
    return ProofNode(conclusion=spec.sequent(), rule=None, premises=(), process=spec.name)


def _take(seq: Sequent, f: Formula, occ: Optional[int], what: str) -> Sequent:
    n = seq.count(f)
    if n == 0:
        raise SchemaMismatch(f"{what}: premise lacks {format_formula(f)}")
    if n > 1 and occ is None:
        raise AmbiguousSelection(
            f"{what}: {format_formula(f)} occurs {n} times; an occurrence index is required"
        )
    if occ is not None and not (0 <= occ < n):
        raise SchemaMismatch(f"{what}: occurrence index {occ} out of range (multiplicity {n})")
    return seq.without(f)


def conclusion_of(rule: Rule, premises: Sequence[Sequent]) -> Sequent:
    """Compute the conclusion a rule yields from premise sequents.

    Raises :class:`SchemaMismatch`, :class:`ContextMismatch` or
    :class:`AmbiguousSelection` when the premises do not fit.
    """
    if len(premises) != _ARITY[rule.tag]:
        raise SchemaMismatch(
            f"{rule.tag} expects {_ARITY[rule.tag]} premises, got {len(premises)}"
        )
    tag = rule.tag
    if tag == ID:
        if not isinstance(rule.a, Atom):
            raise SchemaMismatch("id applies to atoms only")
        return Sequent((dual(rule.a), rule.a))
    if tag == CUT:
        c = rule.a
        left = _take(premises[0], c, rule.occ_a, "cut")
        right = _take(premises[1], dual(c), rule.occ_b, "cut")
        return Sequent(left.formulas + right.formulas)
    if tag == TIMES:
        left = _take(premises[0], rule.a, rule.occ_a, "times")
        right = _take(premises[1], rule.b, rule.occ_b, "times")
        return Sequent(left.formulas + right.formulas + (tensor(rule.a, rule.b),))
    if tag == PAR:
        na, nb = dual(rule.a), dual(rule.b)
        s = _take(premises[0], na, rule.occ_a, "par")
        s = _take(s, nb, rule.occ_b if na != nb else 0, "par")
        return s.add(dual(tensor(rule.a, rule.b)))
    if tag == PLUS_L:
        s = _take(premises[0], rule.a, rule.occ_a, "plus_l")
        return s.add(plus(rule.a, rule.b))
    if tag == PLUS_R:
        s = _take(premises[0], rule.b, rule.occ_b, "plus_r")
        return s.add(plus(rule.a, rule.b))
    if tag == WITH:
        ctx1 = _take(premises[0], dual(rule.a), rule.occ_a, "with")
        ctx2 = _take(premises[1], dual(rule.b), rule.occ_b, "with")
        if ctx1 != ctx2:
            raise ContextMismatch(
                "with: premise contexts differ: "
                f"|- {format_sequent(ctx1)} vs |- {format_sequent(ctx2)}"
            )
        return ctx1.add(dual(plus(rule.a, rule.b)))
    raise SchemaMismatch(f"unknown rule tag {tag!r}")


def apply_rule(rule: Rule, premises: Sequence[ProofNode]) -> ProofNode:
    """Apply an inference rule to proof nodes, checking the schema."""
    conclusion = conclusion_of(rule, [p.conclusion for p in premises])
    return ProofNode(conclusion=conclusion, rule=rule, premises=tuple(premises))


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    path: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify(root: ProofNode, components: Optional[dict] = None) -> VerifyResult:
    """Recheck a derivation bottom-up.

    True iff every node's conclusion is reproduced by re-applying its rule
    to its premises' conclusions and every leaf is an ``id`` instance or a
    registered component process (when ``components`` is given, leaf
    conclusions must match the registered specs).  On failure the result
    carries the premise-index path to the first offending node.
    """
    stack = [(root, ())]
    order = []
    while stack:
        node, path = stack.pop()
        order.append((node, path))
        for i, p in enumerate(node.premises):
            stack.append((p, path + (i,)))
    for node, path in reversed(order):
        if node.process is not None:
            if node.rule is not None or node.premises:
                return VerifyResult(False, path, "process leaf with rule or premises")
            if components is not None:
                spec = components.get(node.process)
                if spec is None:
                    return VerifyResult(False, path, f"unregistered component {node.process!r}")
                if spec.sequent() != node.conclusion:
                    return VerifyResult(False, path, f"leaf sequent differs from spec {node.process!r}")
            continue
        if node.rule is None:
            return VerifyResult(False, path, "node has neither rule nor process")
        try:
            expect = conclusion_of(node.rule, [p.conclusion for p in node.premises])
        except Exception as e:  # schema violations are verification failures
            return VerifyResult(False, path, f"{type(e).__name__}: {e}")
        if expect != node.conclusion:
            return VerifyResult(False, path, "conclusion not reproduced by rule")
    return VerifyResult(True)


# --------------------------------------------------------------------------
# serialization (nested record format for audit and the UI provenance view)


def proof_to_dict(node: ProofNode) -> dict:
    if node.process is not None:
        return {"process": node.process}
    r = node.rule
    d: dict = {"rule": r.tag}
    if r.a is not None:
        d["a"] = format_formula(r.a)
    if r.b is not None:
        d["b"] = format_formula(r.b)
    if r.occ_a is not None:
        d["occ_a"] = r.occ_a
    if r.occ_b is not None:
        d["occ_b"] = r.occ_b
    d["premises"] = [proof_to_dict(p) for p in node.premises]
    return d


def proof_from_dict(d: dict, specs: dict) -> ProofNode:
    """Rebuild (and thereby recheck) a serialized proof.

    ``specs`` maps process names to their :class:`ProcessSpec`; rule nodes
    are reconstructed through :func:`apply_rule`, so a tampered record
    fails to load.
    """
    if "process" in d:
        name = d["process"]
        if name not in specs:
            raise SchemaMismatch(f"proof references unknown process {name!r}")
        return leaf(specs[name])
    rule = Rule(
        tag=d["rule"],
        a=parse_formula(d["a"]) if "a" in d else None,
        b=parse_formula(d["b"]) if "b" in d else None,
        occ_a=d.get("occ_a"),
        occ_b=d.get("occ_b"),
    )
    premises = [proof_from_dict(p, specs) for p in d.get("premises", [])]
    return apply_rule(rule, premises)
