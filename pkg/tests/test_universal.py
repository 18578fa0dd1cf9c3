import itertools

import pytest

from chuspace import BINARY, ChuMorphism, ChuSpace, enumerate_morphisms, enumerate_spaces, validate
from chuspace.errors import EmptyApexAttributes, NotMonicInIC, NotStronglyFinite
from chuspace.chain import ChainGenerator
from chuspace.universal import (amalgamate, bifinite_from_chain, catalog, check_algebroidal_witnesses,
                                embeds_somewhere, find_extension, fraisse_build, verify_resolution,
                                validate_stage_chain)


def _monic_cospans(base, pool, limit=60):
    out = []
    for L, R in itertools.product(pool, repeat=2):
        for f in enumerate_morphisms(base, L, "monic-C"):
            for g in enumerate_morphisms(base, R, "monic-C"):
                out.append((f, g))
                if len(out) >= limit:
                    return out
    return out


def test_amalgam_commutes_and_legs_are_monic():
    base = ChuSpace.from_rows([[0, 1]], ["a"], ["x", "y"])
    pool = [s for s in enumerate_spaces(BINARY, 2, 3, "strongly-finite")]
    squares = 0
    for f, g in _monic_cospans(base, pool):
        try:
            sq = amalgamate(base, f, g)
        except EmptyApexAttributes:
            continue
        squares += 1
        assert sq.commutes()
        for leg in (sq.from_left, sq.from_right):
            assert validate(leg) and leg.forward_injective and leg.backward_surjective
    assert squares > 0


def test_amalgam_labels():
    base = ChuSpace.from_rows([[1]], ["a"], ["x"])
    left = ChuSpace.from_rows([[1, 1], [0, 1]], ["a", "b"], ["x", "z"])
    f = ChuMorphism.from_labels(base, left, {"a": "a"}, {"x": "x", "z": "x"})
    sq = amalgamate(base, f, f)
    assert sq.apex.objects == ("a", "b", "b.r")
    assert sq.apex.attributes[0] == "(x,x)"


def test_amalgam_rejects_non_monic(two_column_map):
    c, c2, m = two_column_map
    with pytest.raises(NotMonicInIC):
        amalgamate(c, m, m)


def test_bifinite_requires_strongly_finite():
    s = ChuSpace.from_rows([[0, 0]])
    with pytest.raises(NotStronglyFinite):
        bifinite_from_chain(ChainGenerator.explicit([s], [], "iC"))


def test_catalog_size():
    cat = catalog(BINARY, 2, 3)
    assert len(cat) == 14
    assert all(s.shape[0] <= 2 and s.shape[1] <= 3 for s in cat)


def test_find_extension_respects_fixed():
    stage = ChuSpace.from_rows([[1, 0], [0, 1]], ["p", "q"], ["u", "v"])
    G = ChuSpace.from_rows([[1, 0]], ["a"], ["x", "y"])
    fwd, bwd = find_extension(stage, G, {0: 0})
    assert fwd == (0,)
    assert find_extension(stage, G, {0: 1}) is not None
    H = ChuSpace.from_rows([[1, 1]], ["a"], ["x", "y"])
    assert find_extension(stage, H, {}) is None


def test_fraisse_small_run():
    state = fraisse_build(BINARY, 2, 3, 40)
    assert validate_stage_chain(state) == []
    assert all(verify_resolution(state, r) for r in state.log)
    assert len(state.log) == 40
    assert any(not r.added_stage for r in state.log)
    rows = state.log_dicts()
    assert rows[0]["task_stage"] == 1
    for G in state.catalog[:5]:
        assert embeds_somewhere(state, G) is not None


def test_fraisse_object_labels():
    state = fraisse_build(BINARY, 2, 3, 10)
    last = state.stages[-1]
    assert all(a.startswith("o") for a in last.objects)


def test_algebroidal_witnesses():
    rep = check_algebroidal_witnesses(BINARY, 2, 2, chains=5)
    assert rep["weakly_initial"]
    assert rep["chains_with_colimit"] == rep["chains_checked"] == 5
