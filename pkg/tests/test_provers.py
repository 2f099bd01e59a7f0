"""Buffers, parallel buffers, filter proving, and the provability oracle."""

import pytest
from hypothesis import given, settings, strategies as st

from llflow.errors import EmptyList, MixedPolarity, SizeCapExceeded
from llflow.formulas import (
    Sequent,
    atom,
    dual,
    natom,
    parse_sequent,
    plus,
    tensor,
    validate_spec,
)
from llflow.kernel import verify
from llflow.provers import (
    ProvabilityOracle,
    buffer_tac,
    parbuf_tac,
    prove_filter,
    provable_oracle,
    rproduct,
)

A, B, C, Z = atom("A"), atom("B"), atom("C"), atom("Z")


def pure_outputs(max_leaves=4, names="ABC"):
    leaf = st.sampled_from([atom(n) for n in names])
    return st.recursive(
        leaf, lambda sub: st.builds(tensor, sub, sub) | st.builds(plus, sub, sub),
        max_leaves=max_leaves,
    )


# -- buffers -------------------------------------------------------------------


def test_axiom_buffer():
    node = buffer_tac(A)
    assert node.conclusion == parse_sequent("~A, A")
    assert node.rule.tag == "id"


def test_tensor_buffer_verifies_and_is_provable():
    node = buffer_tac(tensor(A, B))
    assert node.conclusion == parse_sequent("~(A*B), A*B")
    assert verify(node)
    assert provable_oracle(node.conclusion)


def test_optional_buffer():
    f = plus(A, tensor(B, C))
    node = buffer_tac(f)
    assert node.conclusion == Sequent([dual(f), f])
    assert verify(node)
    assert provable_oracle(node.conclusion)


def test_buffer_rejects_inputs():
    with pytest.raises(MixedPolarity):
        buffer_tac(natom("A"))


@given(pure_outputs())
@settings(max_examples=60, deadline=None)
def test_buffer_always_succeeds_and_verifies(f):
    node = buffer_tac(f)
    assert node.conclusion == Sequent([dual(f), f])
    assert verify(node)


def test_parbuf_degenerate_is_buffer():
    assert parbuf_tac([A]).conclusion == parse_sequent("~A, A")


def test_parbuf_two_atoms():
    node = parbuf_tac([A, B])
    assert node.conclusion == parse_sequent("~A, ~B, A*B")
    assert verify(node)


def test_parbuf_with_optional_component():
    node = parbuf_tac([plus(A, B), C])
    assert node.conclusion == parse_sequent("~(A+B), ~C, (A+B)*C")
    assert verify(node)
    assert provable_oracle(node.conclusion)


def test_parbuf_empty_rejected():
    with pytest.raises(EmptyList):
        parbuf_tac([])


def test_rproduct_right_associated():
    assert rproduct([A, B, C]) is tensor(A, tensor(B, C))


@given(st.lists(pure_outputs(max_leaves=3), min_size=1, max_size=3))
@settings(max_examples=40, deadline=None)
def test_parbuf_always_succeeds_and_verifies(fs):
    node = parbuf_tac(fs)
    assert verify(node)
    assert node.conclusion == Sequent([dual(f) for f in fs] + [rproduct(fs)])


# -- filters ---------------------------------------------------------------------


def test_filter_commutativity():
    proof = prove_filter(tensor(A, B), tensor(B, A))
    assert proof is not None
    assert proof.conclusion == parse_sequent("~(A*B), B*A")
    assert verify(proof)


def test_filter_distinct_atoms_fail_fast():
    assert prove_filter(B, C) is None
    assert prove_filter(B, atom("D")) is None


def test_filter_injection():
    proof = prove_filter(tensor(Z, A), plus(Z, tensor(Z, A)))
    assert proof is not None
    assert verify(proof)


def test_filter_identity_is_axiom():
    proof = prove_filter(A, A)
    assert proof is not None
    assert proof.rule.tag == "id"


def test_filter_requires_output_polarity():
    with pytest.raises(MixedPolarity):
        prove_filter(natom("A"), A)


def test_filter_conclusions_are_valid_process_shapes():
    pairs = [
        (tensor(A, B), tensor(B, A)),
        (plus(A, B), plus(B, A)),
        (tensor(A, tensor(B, C)), tensor(tensor(A, B), C)),
        (A, plus(A, B)),
    ]
    for src, dst in pairs:
        proof = prove_filter(src, dst)
        assert proof is not None
        spec = validate_spec("f", proof.conclusion)
        assert spec.output is dst
        assert spec.inputs == Sequent([dual(src)])


# -- oracle -----------------------------------------------------------------------


def test_oracle_axiom():
    assert provable_oracle(parse_sequent("~A, A"))


def test_oracle_distinct_atoms():
    assert not provable_oracle(parse_sequent("~A, B"))


def test_oracle_commutativity_lemma():
    assert provable_oracle(parse_sequent("~(A*B), B*A"))


def test_oracle_unbalanced_optional_is_provable():
    # one atom occurrence of B, yet provable: no atom-balance pruning allowed
    assert provable_oracle(parse_sequent("~A, A+B"))


def test_oracle_permutation_invariance():
    s1 = parse_sequent("~(A*B), ~C, (B*A)*C")
    s2 = parse_sequent("(B*A)*C, ~(A*B), ~C")
    assert provable_oracle(s1) == provable_oracle(s2) is True


def test_oracle_size_cap():
    big = rproduct([atom(f"T{i}") for i in range(14)])
    with pytest.raises(SizeCapExceeded):
        provable_oracle(Sequent([big]))
    assert not ProvabilityOracle(cap=50).provable(Sequent([big]))


def test_empty_and_singleton_unprovable():
    assert not provable_oracle(Sequent([]))
    assert not provable_oracle(Sequent([A]))
    assert not provable_oracle(Sequent([plus(A, dual(A))] ))


# -- agreement (small smoke version; the full enumeration is in acceptance) -------


@given(pure_outputs(max_leaves=3), pure_outputs(max_leaves=3))
@settings(max_examples=150, deadline=None)
def test_filter_agrees_with_oracle(src, dst):
    got = prove_filter(src, dst) is not None
    want = provable_oracle(Sequent([dual(src), dst]))
    assert got == want


@given(pure_outputs(max_leaves=4))
@settings(max_examples=60, deadline=None)
def test_filter_proofs_verify(f):
    proof = prove_filter(f, f)
    assert proof is not None and verify(proof)
