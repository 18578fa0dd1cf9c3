import pytest
from hypothesis import given

from chuspace import (BINARY, Alphabet, ChuMorphism, ChuSpace, complete_forward, compose, count_morphisms,
                      enumerate_morphisms, enumerate_spaces, initial_space, is_monic, validate)
from chuspace.errors import (AlphabetMismatch, BudgetExceeded, CategoryMembershipViolated,
                             CompositionMismatch, ContractViolation)
from chuspace.gallery import order_chain
from chuspace.morph import (backward_candidates, check_surjective_forward_implies_injective_backward,
                            completion_is_unique, definitional_refutation, injectivity_witness,
                            surjectivity_witness, witness_is_valid)
from conftest import spaces


def test_example_morphism_validates(two_column_map):
    c, c2, m = two_column_map
    assert validate(m)
    bad = ChuMorphism.from_labels(c, c2, {"a": "b"}, {"y": "x2"})
    assert not validate(bad)


def test_exactly_one_morphism(two_column_map):
    c, c2, m = two_column_map
    ms = list(enumerate_morphisms(c, c2))
    assert ms == [m]


def test_verdicts_per_category(two_column_map):
    _, _, m = two_column_map
    for cat in ("B", "E"):
        v = is_monic(m, cat)
        assert v.monic and v.witness is None and not v.backward_surjective
    v = is_monic(m, "C")
    assert not v.monic and v.failed == "backward-surjectivity"
    assert witness_is_valid(v.witness, m)
    labels = v.witness.test_space.attributes
    assert labels == ("x1", "x2.copy1", "x2.copy2")


def test_injectivity_witness_probe():
    s = ChuSpace.from_rows([[0, 1], [0, 1]], ["a1", "a2"], ["x", "y"])
    t = ChuSpace.from_rows([[0, 1]], ["b"], ["x", "y"])
    m = ChuMorphism.from_labels(s, t, {"a1": "b", "a2": "b"}, {"x": "x", "y": "y"})
    assert validate(m)
    w = injectivity_witness(m)
    assert w.kind == "forward-injectivity"
    assert w.test_space.matrix.tolist() == [[0, 1]]
    assert witness_is_valid(w, m)
    assert surjectivity_witness(m) is None


def test_fresh_labels_avoid_collisions():
    s = ChuSpace.from_rows([[0, 1, 1]], ["a"], ["x", "x.copy1", "z"])
    t = ChuSpace.from_rows([[0]], ["b"], ["y"])
    m = ChuMorphism.from_labels(s, t, {"a": "a" and "b"}, {"y": "x"})
    w = surjectivity_witness(m)
    assert len(set(w.test_space.attributes)) == len(w.test_space.attributes)
    assert witness_is_valid(w, m)


def test_identity_and_composition():
    s = ChuSpace.from_rows([[1, 0], [0, 1]])
    i = ChuMorphism.identity(s)
    assert validate(i)
    for m in enumerate_morphisms(s, s):
        assert compose(i, m) == m == compose(m, i)


def test_composition_mismatch(two_column_map):
    c, c2, m = two_column_map
    with pytest.raises(CompositionMismatch):
        compose(m, m)


def test_order_chain_composite():
    chain = order_chain(3)
    m = compose(chain.link(2), chain.link(1))
    assert m.forward == (0,)
    assert m.backward == (0, 0, 0)
    assert m.backward_labels() == {"1": "1", "2": "1", "3": "1"}


def test_invalid_maps_rejected():
    s = ChuSpace.from_rows([[0]], ["a"], ["x"])
    with pytest.raises(ContractViolation):
        ChuMorphism(s, s, (1,), (0,))
    with pytest.raises(ContractViolation):
        ChuMorphism.from_labels(s, s, {}, {"x": "x"})


def test_alphabet_mismatch_on_validate():
    a = ChuSpace.from_rows([[0]], ["a"], ["x"])
    b = ChuSpace.from_rows([[0]], ["a"], ["x"], alphabet=Alphabet.parse("0,1,2"))
    with pytest.raises(AlphabetMismatch):
        validate(ChuMorphism(a, b, (0,), (0,)))


def test_initial_space_maps_everywhere():
    init = initial_space()
    for t in enumerate_spaces(BINARY, 2, 2, "strongly-finite"):
        assert count_morphisms(init, t) >= 1


def test_enumeration_budget():
    s = ChuSpace.from_rows([[0]] * 6, [f"a{k}" for k in range(6)], ["x"])
    t = ChuSpace.from_rows([[0]] * 20, [f"b{k}" for k in range(20)], ["y"])
    with pytest.raises(BudgetExceeded):
        list(enumerate_morphisms(s, t, budget=1000))


def test_complete_forward(two_column_map):
    c, c2, m = two_column_map
    assert complete_forward(c, c2, {"a": "b"}) == m
    # target column (1, 0) is not a source column
    s = ChuSpace.from_rows([[1], [1]], ["p", "q"], ["c"])
    t = ChuSpace.from_rows([[1], [0]], ["u", "v"], ["d"])
    assert complete_forward(s, t, {"p": "u", "q": "v"}) is None


def test_discrete_source_completes_every_forward_map():
    import itertools

    from chuspace.gallery import discrete_space

    d = discrete_space(2)
    t = ChuSpace.from_rows([[0, 1, 1], [1, 1, 0], [0, 0, 1]])
    for fwd in itertools.product(range(3), repeat=2):
        assert complete_forward(d, t, fwd) is not None
        assert completion_is_unique(d, t, fwd)


def test_non_unique_completion_flagged():
    s = ChuSpace.from_rows([[0, 0]], ["a"], ["x", "y"])
    t = ChuSpace.from_rows([[0]], ["b"], ["z"])
    assert len(backward_candidates(s, t, (0,))[0]) == 2
    assert not completion_is_unique(s, t, (0,))


def test_membership_required():
    s = ChuSpace.from_rows([[0, 0]], ["a"], ["x", "y"])
    with pytest.raises(CategoryMembershipViolated):
        is_monic(ChuMorphism.identity(s), "E")


def test_unary_alphabet_flagged():
    one = Alphabet(("0",))
    s = ChuSpace.from_rows([[0]], ["a"], ["x"], alphabet=one)
    v = is_monic(ChuMorphism.identity(s), "C")
    assert v.monic and v.outside_assumption


def test_surjective_forward_implication_on_iso():
    s = ChuSpace.from_rows([[1, 0], [0, 1]])
    check = check_surjective_forward_implies_injective_backward(ChuMorphism.identity(s))
    assert check.applies and check.holds


@given(spaces(2, 2), spaces(2, 2))
def test_verdict_matches_witness_and_definition(s, t):
    tests = list(enumerate_spaces(BINARY, 2, 3))
    for m in enumerate_morphisms(s, t):
        v = is_monic(m, "C")
        assert (v.witness is None) == v.monic
        if v.witness is not None:
            assert witness_is_valid(v.witness, m)
        assert (definitional_refutation(m, tests, "C") is None) == v.monic


@given(spaces(2, 2), spaces(2, 2))
def test_restricted_enumeration_filters(s, t):
    every = list(enumerate_morphisms(s, t))
    c = list(enumerate_morphisms(s, t, "monic-C"))
    e = list(enumerate_morphisms(s, t, "monic-E"))
    assert c == [m for m in every if m.forward_injective and m.backward_surjective]
    assert e == [m for m in every if m.forward_injective]


def test_surjective_forward_needs_extensional_target():
    s = ChuSpace.from_rows([[0]], ["a"], ["x"])
    t = ChuSpace.from_rows([[0, 0]], ["b"], ["y", "z"])
    m = ChuMorphism(s, t, (0,), (0, 0))
    assert validate(m) and m.forward_surjective and not m.backward_injective
    check = check_surjective_forward_implies_injective_backward(m)
    assert not check.applies and check.holds
