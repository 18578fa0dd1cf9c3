import pytest
from hypothesis import given

from chuspace import ChuSpace, is_discrete, is_extensional
from chuspace.errors import CategoryMembershipViolated
from chuspace.finobj import (attribute_bound, classify, classify_iB, classify_iC, classify_iE,
                             find_factorization, spot_check_factorization)
from chuspace.gallery import (biextensional_witness_chain, column_pair_fixture, discrete_space,
                              nondiscrete_witness_chain, repeated_column_fixture)
from conftest import spaces


def test_classifier_examples():
    d = discrete_space(2)
    assert classify_iC(d) and classify_iE(d) and classify_iB(d)
    s = ChuSpace.from_rows([[0, 1], [1, 1]])
    assert classify_iC(s) and not classify_iE(s) and not classify_iB(s)
    lone = ChuSpace.from_rows([[]], ["a"], [])
    assert classify_iB(lone)
    assert not classify_iC(ChuSpace.from_rows([[0, 0]]))


def test_membership_errors():
    dup = ChuSpace.from_rows([[0, 0]])
    with pytest.raises(CategoryMembershipViolated):
        classify_iE(dup)
    rows = ChuSpace.from_rows([[0, 1], [0, 1]])
    with pytest.raises(CategoryMembershipViolated):
        classify_iB(rows)


def test_report_marks_non_membership():
    rep = classify(ChuSpace.from_rows([[0, 0]]))
    assert rep.finite_iE is None and rep.finite_iB is None and rep.attribute_bound is None
    rep = classify(ChuSpace.from_rows([[0, 1], [1, 1]]))
    assert rep.finite_iE is False and rep.missing_function is not None
    d = rep.to_dict()
    assert d["sigma"] == ["0", "1"]


@given(spaces(3, 4))
def test_attribute_bound_holds_for_extensional(s):
    bound = attribute_bound(s)
    assert (bound is None) == (not is_extensional(s))
    if bound is not None:
        assert bound


@given(spaces(3, 3))
def test_report_consistent(s):
    rep = classify(s)
    assert rep.discrete == is_discrete(s)
    assert rep.finite_iC == is_extensional(s)
    if rep.finite_iE is not None:
        assert rep.finite_iE == rep.discrete


S = ChuSpace.from_rows([[0, 1], [1, 1]], ["p", "q"], ["x", "y"])


@pytest.mark.parametrize("fixture", [
    lambda: nondiscrete_witness_chain(S, 4),
    lambda: repeated_column_fixture(5),
    lambda: column_pair_fixture(5),
    lambda: biextensional_witness_chain(S, 3),
])
def test_fixtures_have_no_factorization(fixture):
    fx = fixture()
    assert not find_factorization(fx.chain, fx.legs, fx.phi, fx.stages_checked).found
    assert spot_check_factorization(fx, False)


def test_factorization_found_for_discrete_candidate():
    d = discrete_space(1)
    fx = nondiscrete_witness_chain(d, 3, v=["0"])
    res = find_factorization(fx.chain, fx.legs, fx.phi, fx.stages_checked)
    assert res.found and res.stage == 1
