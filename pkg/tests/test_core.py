import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chuspace import (BINARY, Alphabet, ChuSpace, canonical_form, enumerate_spaces, find_isomorphism,
                      initial_space, is_biextensional, is_discrete, is_extensional, is_isomorphic,
                      is_separable, is_strongly_finite, missing_column, validate)
from chuspace.core import FILTERS
from chuspace.errors import AlphabetMismatch, BudgetExceeded, ContractViolation
from conftest import spaces


def test_alphabet_parse_and_index():
    a = Alphabet.parse("0,1,2")
    assert a.symbols == ("0", "1", "2")
    assert a.index("2") == 2
    with pytest.raises(ContractViolation):
        a.index("3")
    with pytest.raises(ContractViolation):
        Alphabet(("0", "0"))


@pytest.mark.parametrize("label", ["", "a b", "a->b"])
def test_bad_labels_rejected(label):
    with pytest.raises(ContractViolation):
        ChuSpace.from_rows([[0]], [label], ["x"])


def test_duplicate_labels_rejected():
    with pytest.raises(ContractViolation):
        ChuSpace.from_rows([[0], [1]], ["a", "a"], ["x"])


def test_from_rows_accepts_symbols_and_indices():
    s1 = ChuSpace.from_rows([["0", "1"]], ["a"], ["x", "y"])
    s2 = ChuSpace.from_rows([[0, 1]], ["a"], ["x", "y"])
    assert s1 == s2 and hash(s1) == hash(s2)
    assert s1.entry("a", "y") == "1"
    assert s1.row("a") == ("0", "1")
    assert s1.column("x") == ("0",)


def test_matrix_is_read_only():
    s = ChuSpace.from_rows([[0, 1]])
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 1


def test_predicates_on_small_cases():
    rep = ChuSpace.from_rows([[0, 0]], ["*"], ["y1", "y2"])
    assert not is_extensional(rep) and is_separable(rep)
    pair = ChuSpace.from_rows([[1], [1]], ["1", "2"], ["c"])
    assert is_extensional(pair) and not is_separable(pair)
    order = ChuSpace.from_rows([[1, 1], [0, 1]])
    assert is_biextensional(order)


def test_missing_column_and_discrete():
    pair = ChuSpace.from_rows([[1], [1]], ["1", "2"], ["c"])
    assert missing_column(pair) == ("0", "0")
    full = ChuSpace.from_rows([[0, 0, 1, 1], [0, 1, 0, 1]])
    assert is_discrete(full) and missing_column(full) is None
    # one function from the empty set, realised by any attribute
    assert is_discrete(initial_space())
    assert not is_discrete(ChuSpace(BINARY, (), (), np.zeros((0, 0), dtype=np.int8)))


def test_discrete_budget():
    wide = ChuSpace.from_rows([[0]] * 21, [f"a{k}" for k in range(21)], ["x"])
    with pytest.raises(BudgetExceeded):
        missing_column(wide)


def test_strongly_finite():
    assert is_strongly_finite(initial_space())
    assert not is_strongly_finite(ChuSpace.from_rows([[]], ["a"], []))
    assert is_strongly_finite(ChuSpace.from_rows([[1, 1], [0, 1]]))


def test_restrict_merges_duplicate_columns():
    s = ChuSpace.from_rows([[0, 1, 1], [0, 0, 1]])
    r = s.restrict([0])
    assert r.shape == (1, 2)
    assert is_extensional(r)


@given(spaces())
def test_canonical_form_is_iso_invariant(s):
    rng = np.random.default_rng(len(s.objects) * 7 + len(s.attributes))
    rp = rng.permutation(len(s.objects))
    cp = rng.permutation(len(s.attributes))
    t = ChuSpace(s.alphabet, tuple(f"b{k}" for k in range(len(rp))), tuple(f"y{k}" for k in range(len(cp))),
                 s.matrix[rp][:, cp] if len(cp) else s.matrix[rp])
    assert canonical_form(s) == canonical_form(t)
    iso = find_isomorphism(s, t)
    assert iso is not None and validate(iso)
    assert iso.forward_injective and iso.backward_injective


@given(spaces(), spaces())
def test_iso_agrees_with_canonical_form(s, t):
    assert is_isomorphic(s, t) == (canonical_form(s) == canonical_form(t))


def test_enumeration_counts_and_order():
    all22 = list(enumerate_spaces(BINARY, 2, 2))
    assert len(all22) == 20
    assert len({canonical_form(s) for s in all22}) == 20
    shapes = [s.shape for s in all22]
    assert shapes == sorted(shapes)
    # 1x1 cell holds (0) and (1)
    assert sum(1 for s in all22 if s.shape == (1, 1)) == 2
    ext = list(enumerate_spaces(BINARY, 2, 2, "extensional"))
    assert all(is_extensional(s) for s in ext)
    bi = list(enumerate_spaces(BINARY, 2, 2, "biextensional"))
    assert all(is_biextensional(s) for s in bi)
    sf = list(enumerate_spaces(BINARY, 2, 3, "strongly-finite"))
    assert all(is_strongly_finite(s) for s in sf) and len(sf) == 14


def test_enumeration_matches_brute_force_iso_classes():
    import itertools

    classes = set()
    for n in range(3):
        for m in range(3):
            for cells in itertools.product(range(2), repeat=n * m):
                s = ChuSpace(BINARY, tuple(f"a{k}" for k in range(n)), tuple(f"x{k}" for k in range(m)),
                             np.array(cells, dtype=np.int8).reshape(n, m))
                classes.add(canonical_form(s))
    assert len(classes) == 20


def test_enumeration_rejects_unknown_filter_and_budget():
    with pytest.raises(ContractViolation):
        list(enumerate_spaces(BINARY, 1, 1, "nope"))
    with pytest.raises(BudgetExceeded):
        list(enumerate_spaces(BINARY, 5, 5, "all", budget=1000))
    assert "strongly-finite" in FILTERS


def test_alphabet_mismatch():
    from chuspace.core import check_same_alphabet

    a = ChuSpace.from_rows([[0]])
    b = ChuSpace.from_rows([[0]], alphabet=Alphabet.parse("0,1,2"))
    with pytest.raises(AlphabetMismatch):
        check_same_alphabet(a, b)


@given(st.integers(0, 3))
def test_ternary_enumeration_is_canonical(n):
    three = Alphabet.parse("a,b,c")
    got = list(enumerate_spaces(three, n, 1, min_objects=n, min_attributes=1))
    assert len({canonical_form(s) for s in got}) == len(got)
