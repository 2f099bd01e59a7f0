"""Automatic proof procedures: buffers, filters, and a provability oracle.

Buffers are identity processes ``|- ~A, A`` that carry a resource through
unchanged; parallel buffers generalize them to lists of resources.  Both
are built by structural recursion and always succeed on polarity-pure
inputs.

A *filter* is a pure-logic lemma ``|- ~src, dst`` used (via cut) to coerce
a resource of type ``src`` into the equivalent type ``dst``; matching
"equal modulo filters" is what lets ``A*B`` feed an input expecting
``B*A``.  Filters are found by exhaustive backward proof search with
memoization; a cheap shared-atom check makes the frequent mismatches
(e.g. distinct atoms) fail immediately, which matters because composition
actions probe many false conjectures before selecting an input.

:class:`ProvabilityOracle` is an independent brute-force decision
procedure for the same calculus, used by the test suite to cross-check the
proof-producing search.  Keep the two implementations separate: they are
each other's safety net.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

from .errors import EmptyList, MixedPolarity, SizeCapExceeded
from .formulas import (
    Atom,
    Formula,
    NegAtom,
    OUTPUT,
    Par,
    Plus,
    Sequent,
    Tensor,
    With,
    dual,
    format_formula,
    tensor,
)
from .kernel import (
    ProofNode,
    apply_rule,
    rule_id,
    rule_par,
    rule_plus_l,
    rule_plus_r,
    rule_times,
    rule_with,
)


def _require_output(f: Formula, what: str) -> None:
    if f.pol != OUTPUT:
        raise MixedPolarity(f"{what} requires an output-polarity formula, got {format_formula(f)}")


def rproduct(fs: Sequence[Formula]) -> Formula:
    """Right-associated tensor product of a non-empty formula list."""
    if not fs:
        raise EmptyList("cannot build an empty product")
    prod = fs[-1]
    for f in reversed(fs[:-1]):
        prod = tensor(f, prod)
    return prod


def buffer_tac(a: Formula) -> ProofNode:
    """Prove the buffer ``|- ~a, a`` for an arbitrary output formula.

    Identity axioms at the atoms, times+par for tensors, and an
    injection pair under `with` for optional outputs.
    """
    _require_output(a, "buffer_tac")
    return _buffer(a)


def _buffer(f: Formula) -> ProofNode:
    if isinstance(f, Atom):
        return apply_rule(rule_id(f), [])
    if isinstance(f, Tensor):
        both = apply_rule(rule_times(f.l, f.r, 0, 0), [_buffer(f.l), _buffer(f.r)])
        return apply_rule(rule_par(f.l, f.r, 0, 0), [both])
    # Plus
    left = apply_rule(rule_plus_l(f.l, f.r, 0), [_buffer(f.l)])
    right = apply_rule(rule_plus_r(f.l, f.r, 0), [_buffer(f.r)])
    return apply_rule(rule_with(f.l, f.r, 0, 0), [left, right])


def parbuf_tac(fs: Sequence[Formula]) -> ProofNode:
    """Prove the parallel buffer ``|- ~a1, ..., ~an, a1 * (a2 * (...))``.

    The product is right-associated; the degenerate single-element case is
    the plain buffer.
    """
    fs = list(fs)
    if not fs:
        raise EmptyList("parbuf_tac needs at least one formula")
    for f in fs:
        _require_output(f, "parbuf_tac")
    node = _buffer(fs[-1])
    for f in reversed(fs[:-1]):
        prod = node.conclusion.positives()[0]
        node = apply_rule(rule_times(f, prod, 0, 0), [_buffer(f), node])
    return node


# --------------------------------------------------------------------------
# proof-producing backward search


class SequentProver:
    """Exhaustive cut-free backward search that returns kernel proofs.

    Invertible steps (par, with) are applied first; the remaining choice
    points (plus branches, tensor context splits) are enumerated with
    memoization on canonical sequents.  Termination is guaranteed because
    every premise has strictly fewer connectives.  The memo table lives on
    the instance, so independent provers never share mutable state.
    """

    def __init__(self):
        self._memo: dict = {}

    def prove(self, formulas: Iterable[Formula]) -> Optional[ProofNode]:
        seq = formulas if isinstance(formulas, Sequent) else Sequent(formulas)
        return self._prove(seq)

    def _prove(self, seq: Sequent) -> Optional[ProofNode]:
        hit = self._memo.get(seq, False)
        if hit is not False:
            return hit
        node = self._attempt(seq)
        self._memo[seq] = node
        return node

    def _attempt(self, seq: Sequent) -> Optional[ProofNode]:
        fs = seq.formulas
        for f in fs:
            if isinstance(f, Par):
                sub = self._prove(seq.without(f).add(f.l, f.r))
                if sub is None:
                    return None
                return apply_rule(rule_par(dual(f.l), dual(f.r), 0, 0), [sub])
        for f in fs:
            if isinstance(f, With):
                rest = seq.without(f)
                left = self._prove(rest.add(f.l))
                if left is None:
                    return None
                right = self._prove(rest.add(f.r))
                if right is None:
                    return None
                return apply_rule(rule_with(dual(f.l), dual(f.r), 0, 0), [left, right])
        if len(fs) == 2:
            a, b = fs
            if isinstance(a, Atom) and isinstance(b, NegAtom) and a.name == b.name:
                return apply_rule(rule_id(a), [])
            if isinstance(b, Atom) and isinstance(a, NegAtom) and a.name == b.name:
                return apply_rule(rule_id(b), [])
        prev = None
        for f in fs:
            if f is prev:
                continue
            prev = f
            if isinstance(f, Plus):
                rest = seq.without(f)
                sub = self._prove(rest.add(f.l))
                if sub is not None:
                    return apply_rule(rule_plus_l(f.l, f.r, 0), [sub])
                sub = self._prove(rest.add(f.r))
                if sub is not None:
                    return apply_rule(rule_plus_r(f.l, f.r, 0), [sub])
            elif isinstance(f, Tensor):
                node = self._tensor_splits(seq, f)
                if node is not None:
                    return node
        return None

    def _tensor_splits(self, seq: Sequent, f: Formula) -> Optional[ProofNode]:
        rest = seq.without(f).formulas
        n = len(rest)
        seen = set()
        for mask in range(1 << n):
            left = tuple(rest[i] for i in range(n) if mask >> i & 1)
            if left in seen:
                continue
            seen.add(left)
            sub_l = self._prove(Sequent(left + (f.l,)))
            if sub_l is None:
                continue
            right = tuple(rest[i] for i in range(n) if not mask >> i & 1)
            sub_r = self._prove(Sequent(right + (f.r,)))
            if sub_r is not None:
                return apply_rule(rule_times(f.l, f.r, 0, 0), [sub_l, sub_r])
        return None


def prove_sequent(formulas: Iterable[Formula], prover: Optional[SequentProver] = None) -> Optional[ProofNode]:
    """Prove a pure-logic sequent; None when it is not derivable."""
    return (prover or SequentProver()).prove(formulas)


def prove_filter(
    src: Formula, dst: Formula, prover: Optional[SequentProver] = None
) -> Optional[ProofNode]:
    """Find a proof of the filter ``|- ~src, dst``, or None.

    Both formulas must be output-polarity, so a successful filter is itself
    a valid one-input/one-output process shape.  Pairs sharing no atom name
    are rejected without search: every branch of a proof needs an identity
    axiom pairing an atom from each side, so disjoint vocabularies can
    never be provable.
    """
    _require_output(src, "prove_filter")
    _require_output(dst, "prove_filter")
    if src.names.isdisjoint(dst.names):
        return None
    return (prover or SequentProver()).prove(Sequent((dual(src), dst)))


# --------------------------------------------------------------------------
# independent brute-force oracle (testing fixture, not a product feature)


class ProvabilityOracle:
    """Brute-force decision procedure for derivability in the calculus.

    Tries every rule instance applicable to every member of the sequent,
    with memoization on canonical multisets; no pruning beyond that, so it
    stays an independent cross-check for the optimized search.  Sequents
    above the connective cap are refused rather than risking runaway
    search.
    """

    def __init__(self, cap: int = 12):
        self.cap = cap
        self._memo: dict = {}

    def provable(self, formulas: Iterable[Formula]) -> bool:
        seq = formulas if isinstance(formulas, Sequent) else Sequent(formulas)
        total = seq.connective_count()
        if total > self.cap:
            raise SizeCapExceeded(f"sequent has {total} connectives, cap is {self.cap}")
        return self._search(seq.formulas)

    def _search(self, fs: tuple) -> bool:
        hit = self._memo.get(fs)
        if hit is not None:
            return hit
        found = False
        if len(fs) == 2:
            a, b = fs
            found = (
                isinstance(a, Atom)
                and isinstance(b, NegAtom)
                and a.name == b.name
            ) or (
                isinstance(b, Atom)
                and isinstance(a, NegAtom)
                and b.name == a.name
            )
        if not found:
            for i, f in enumerate(fs):
                rest = fs[:i] + fs[i + 1 :]
                if isinstance(f, Par):
                    if self._search(_resort(rest, f.l, f.r)):
                        found = True
                        break
                elif isinstance(f, With):
                    if self._search(_resort(rest, f.l)) and self._search(_resort(rest, f.r)):
                        found = True
                        break
                elif isinstance(f, Plus):
                    if self._search(_resort(rest, f.l)) or self._search(_resort(rest, f.r)):
                        found = True
                        break
                elif isinstance(f, Tensor):
                    if self._tensor_instances(rest, f):
                        found = True
                        break
        self._memo[fs] = found
        return found

    def _tensor_instances(self, rest: tuple, f: Formula) -> bool:
        n = len(rest)
        for mask in range(1 << n):
            gamma = tuple(rest[i] for i in range(n) if mask >> i & 1)
            delta = tuple(rest[i] for i in range(n) if not mask >> i & 1)
            if self._search(_resort(gamma, f.l)) and self._search(_resort(delta, f.r)):
                return True
        return False


def _resort(fs: tuple, *extra: Formula) -> tuple:
    return tuple(sorted(fs + extra, key=lambda f: f.key))


def provable_oracle(formulas: Iterable[Formula], cap: int = 12) -> bool:
    """One-shot oracle query with a fresh memo table."""
    return ProvabilityOracle(cap=cap).provable(formulas)
