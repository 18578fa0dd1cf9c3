import numpy as np
import pytest

from chuspace import ChuSpace, is_biextensional, is_discrete, is_extensional, validate
from chuspace.chain import colimit, validate_chain
from chuspace.errors import ContractViolation, NotStrictlyIncreasing
from chuspace.gallery import (GENERATORS, biextensional_witness_chain, column_pair_fixture, demo_no_colimit_in_iC,
                              discrete_family, discrete_space, divisibility_block, divisibility_chain,
                              generator_chain, nondiscrete_witness_chain, order_space, repeated_column_fixture,
                              subset_chain, unit_block, zero_block)


def test_order_space_shape():
    s = order_space(3)
    assert s.matrix.tolist() == [[1, 1, 1], [0, 1, 1], [0, 0, 1]]
    t = order_space(3, extra_top=True)
    assert t.shape == (3, 4) and t.matrix[:, -1].tolist() == [1, 1, 1]


@pytest.mark.parametrize("gen", GENERATORS)
def test_every_generator_builds_a_valid_chain(gen):
    chain = generator_chain(gen, 4)
    assert validate_chain(chain) == []


def test_unknown_generator():
    with pytest.raises(ContractViolation):
        generator_chain("nope", 3)


def test_divisibility_chain_is_iE():
    chain = divisibility_chain(3)
    assert chain.category == "iE" and chain.max_length == 4
    assert chain.stage(4).shape[1] == 0
    for i in range(1, 4):
        assert validate(chain.link(i))
        assert is_extensional(chain.stage(i))


def test_discrete_space_labels():
    d = discrete_space(2)
    assert d.attributes == ("0.0", "0.1", "1.0", "1.1")
    assert is_discrete(d)
    fam = discrete_family(3)
    assert colimit(fam).thread_count == 8


def test_subset_chain_strictness():
    with pytest.raises(NotStrictlyIncreasing):
        subset_chain([["a", "b"], ["a"]])
    with pytest.raises(ContractViolation):
        subset_chain([["a", "a"]])


def test_blocks():
    assert zero_block(2, 3).sum() == 0
    u = unit_block(2, 3, [2, 0])
    assert u.tolist() == [[0, 0, 1], [1, 0, 0]]
    b = divisibility_block(3, 1)
    assert b.dtype == np.int8


def test_witness_fixtures_are_valid():
    s = ChuSpace.from_rows([[0, 1], [1, 1]], ["p", "q"], ["x", "y"])
    fixtures = [nondiscrete_witness_chain(s, 4), repeated_column_fixture(5), column_pair_fixture(5)]
    for fx in fixtures:
        assert validate_chain(fx.chain) == []
        assert validate(fx.phi)
        for leg in fx.legs:
            assert validate(leg)


def test_biextensional_witness_fixture():
    s = ChuSpace.from_rows([[0, 1], [1, 1]], ["p", "q"], ["x", "y"])
    assert is_biextensional(s)
    fx = biextensional_witness_chain(s, 3)
    assert validate_chain(fx.chain) == []
    assert all(is_biextensional(fx.chain.stage(i)) for i in range(1, 4))


def test_demo_no_colimit():
    rep = demo_no_colimit_in_iC(4)
    assert rep.cocone_valid and rep.cocone_t_valid
    assert rep.commuting_monic_iC == 0
    assert rep.ie_mediator_exists and rep.ie_mediator_commutes
    assert rep.contradiction_cells
