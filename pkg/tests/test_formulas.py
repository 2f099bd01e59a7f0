"""Formula layer: duals, polarity, sequent multisets, parsing."""

import pytest
from hypothesis import given, strategies as st

from llflow.errors import MixedPolarity, MultipleOutputs, NoOutput, ParseError
from llflow.formulas import (
    INPUT,
    OUTPUT,
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
    subterm_at,
    tensor,
    validate_spec,
    wth,
)

A, B, C, X = atom("A"), atom("B"), atom("C"), atom("X")


def formulas(max_leaves=4, names="ABC"):
    leaf = st.sampled_from([atom(n) for n in names] + [natom(n) for n in names])
    return st.recursive(
        leaf,
        lambda sub: st.builds(tensor, sub, sub)
        | st.builds(plus, sub, sub)
        | st.builds(lambda f: dual(f), sub),
        max_leaves=max_leaves,
    )


def pure_outputs(max_leaves=4, names="ABC"):
    leaf = st.sampled_from([atom(n) for n in names])
    return st.recursive(
        leaf, lambda sub: st.builds(tensor, sub, sub) | st.builds(plus, sub, sub),
        max_leaves=max_leaves,
    )


# -- dual ---------------------------------------------------------------


def test_dual_tensor_is_par_of_duals():
    assert dual(tensor(A, B)) is parse_formula("~(A*B)")
    assert format_formula(dual(tensor(A, B))) == "~(A*B)"


def test_dual_involution_example():
    f = plus(A, tensor(B, C))
    assert dual(dual(f)) is f


def test_dual_atom():
    assert dual(A) is natom("A")


@given(formulas())
def test_dual_involution(f):
    assert dual(dual(f)) is f


@given(pure_outputs())
def test_polarity_flips_under_dual(f):
    assert polarity(f) == OUTPUT
    assert polarity(dual(f)) == INPUT


# -- polarity -----------------------------------------------------------


def test_polarity_output_tree():
    assert polarity(tensor(A, plus(B, C))) == OUTPUT


def test_polarity_input_tree():
    assert polarity(dual(plus(A, C))) == INPUT


def test_polarity_mixed_raises():
    with pytest.raises(MixedPolarity):
        polarity(tensor(A, dual(B)))


def test_interning_makes_equal_formulas_identical():
    assert tensor(A, B) is tensor(atom("A"), atom("B"))
    assert wth(natom("A"), natom("B")) is dual(plus(A, B))


# -- validate_spec -------------------------------------------------------


def test_validate_spec_canonical_shape():
    s = parse_sequent("~A, ~B, X")
    spec = validate_spec("p", s)
    assert spec.output is X
    assert spec.inputs == Sequent([natom("A"), natom("B")])
    assert spec.sequent() == s


def test_validate_spec_multiple_outputs():
    with pytest.raises(MultipleOutputs):
        validate_spec("p", parse_sequent("A, B"))


def test_validate_spec_no_output():
    with pytest.raises(NoOutput):
        validate_spec("p", parse_sequent("~A, ~B"))


def test_validate_spec_drug_example():
    spec = validate_spec(
        "DeliverDrug", parse_sequent("~Patient, ~Dosage, ~NurseTime, Treated+Failed")
    )
    assert format_formula(spec.output) == "Treated+Failed"
    assert len(spec.inputs) == 3


@given(st.lists(pure_outputs(max_leaves=3), min_size=0, max_size=4))
def test_validate_spec_iff_exactly_one_positive(outputs):
    inputs = [natom("A"), natom("B")]
    s = Sequent(inputs + outputs)
    if len(outputs) == 1:
        assert validate_spec("p", s).output is outputs[0]
    else:
        with pytest.raises((NoOutput, MultipleOutputs)):
            validate_spec("p", s)


# -- sequents / multisets --------------------------------------------------


def test_multiset_duplicates_allowed():
    s = parse_sequent("~C, ~C, X")
    assert s.count(natom("C")) == 2


def test_multiset_equality_is_order_invariant():
    assert parse_sequent("~A, X, ~B") == parse_sequent("X, ~B, ~A")


@given(st.lists(formulas(max_leaves=3), max_size=5), st.randoms())
def test_canonical_equality_invariant_under_permutation(fs, rnd):
    shuffled = list(fs)
    rnd.shuffle(shuffled)
    assert Sequent(fs) == Sequent(shuffled)
    assert hash(Sequent(fs)) == hash(Sequent(shuffled))


def test_mdiff_examples():
    nb = natom("B")
    assert mdiff([nb], []) == Sequent([nb])
    nc = natom("C")
    assert mdiff([nc, nc], [nc]) == Sequent([nc])
    assert mdiff([], [natom("A")]) == Sequent([])


def test_mdiff_respects_multiplicity():
    s = mdiff(parse_sequent("~A, ~C, ~C"), parse_sequent("~C"))
    assert s == parse_sequent("~A, ~C")


def test_without_missing_raises():
    with pytest.raises(ValueError):
        parse_sequent("~A, X").without(natom("B"))


# -- parsing / printing ----------------------------------------------------


def test_precedence_star_binds_tighter():
    assert parse_formula("A+B*C") is plus(A, tensor(B, C))


def test_left_associativity():
    assert parse_formula("A*B*C") is tensor(tensor(A, B), C)
    assert parse_formula("A+B+C") is plus(plus(A, B), C)


def test_parse_dual_of_composite():
    assert parse_formula("~(A+B)") is wth(natom("A"), natom("B"))


def test_parse_errors_have_position():
    with pytest.raises(ParseError):
        parse_formula("A *")
    with pytest.raises(ParseError):
        parse_formula("(A+B")
    with pytest.raises(ParseError):
        parse_sequent("A, , B")


@given(formulas(max_leaves=5))
def test_format_parse_round_trip(f):
    assert parse_formula(format_formula(f)) is f


@given(st.lists(formulas(max_leaves=3), min_size=1, max_size=4))
def test_sequent_round_trip(fs):
    s = Sequent(fs)
    assert parse_sequent(format_sequent(s)) == s


def test_subterm_at():
    f = parse_formula("A+(B*C)")
    assert subterm_at(f, ["right", "left"]) is B
    with pytest.raises(KeyError):
        subterm_at(f, ["left", "left"])
