import json

import pytest
from hypothesis import given

from chuspace import ChuMorphism, ChuSpace
from chuspace.errors import FormatError
from chuspace.formats import (chain_from_json, chain_to_json, emit_chain, emit_generator, emit_morphism,
                              emit_space, generator_from_text, load_chain, load_morphism, load_space,
                              morphism_from_json, morphism_to_json, parse_chain, parse_generator,
                              parse_morphism, parse_space, space_from_json, space_to_json, write_text)
from chuspace.gallery import order_chain, subset_chain
from conftest import spaces


@given(spaces(3, 4))
def test_space_text_roundtrip_is_bit_exact(s):
    text = emit_space(s)
    back = parse_space(text)
    assert back == s
    assert emit_space(back) == text


@given(spaces(3, 4))
def test_space_json_roundtrip(s):
    data = json.loads(json.dumps(space_to_json(s)))
    assert space_from_json(data) == s


def test_space_text_layout(two_column_map):
    c, _, _ = two_column_map
    assert emit_space(c) == "chu v1\nsigma 0 1\nobjects a\nattributes x1 x2\nmatrix\n0 1\n"


@pytest.mark.parametrize("text", [
    "chu v2\nsigma 0 1\nobjects a\nattributes x\nmatrix\n0\n",
    "chu v1\nsigma 0 1\nobjects a\nattributes x\nmatrix\n2\n",
    "chu v1\nsigma 0 1\nobjects a a\nattributes x\nmatrix\n0\n0\n",
    "chu v1\nsigma 0 1\nobjects a\nattributes x y\nmatrix\n0\n",
    "chu v1\r\nsigma 0 1\r\nobjects a\r\nattributes x\r\nmatrix\r\n0\r\n",
])
def test_malformed_space_rejected(text):
    with pytest.raises(FormatError):
        parse_space(text)


def test_morphism_roundtrip(two_column_map):
    _, _, m = two_column_map
    text = emit_morphism(m)
    assert parse_morphism(text) == m
    assert morphism_from_json(json.loads(json.dumps(morphism_to_json(m)))) == m


def test_morphism_with_file_endpoints(tmp_path, two_column_map):
    c, c2, m = two_column_map
    write_text(tmp_path / "c.chu", emit_space(c))
    write_text(tmp_path / "d.chu", emit_space(c2))
    write_text(tmp_path / "m.chumorph", emit_morphism(m, "c.chu", "d.chu"))
    assert load_morphism(tmp_path / "m.chumorph") == m
    assert load_space(tmp_path / "c.chu") == c


def test_parse_keeps_non_adjoint_pairs_for_checking(two_column_map):
    from chuspace import validate

    c, c2, m = two_column_map
    text = emit_morphism(m)
    assert not validate(parse_morphism(text.replace("y->x1", "y->x2")))
    with pytest.raises(FormatError):
        parse_morphism(text.replace("y->x1", "y->nope"))


def test_chain_roundtrip():
    chain = subset_chain([["a"], ["a", "b"], ["a", "b", "c"]])
    text = emit_chain(chain)
    back = parse_chain(text)
    assert back.max_length == 3
    for i in range(1, 4):
        assert back.stage(i) == chain.stage(i)
    for i in range(1, 3):
        assert back.link(i) == chain.link(i)
    again = chain_from_json(json.loads(json.dumps(chain_to_json(chain))))
    assert emit_chain(again) == text


def test_generated_chain_written_at_depth(tmp_path):
    chain = order_chain(4)
    text = emit_chain(chain, 3)
    write_text(tmp_path / "o.chuchain", text)
    back = load_chain(tmp_path / "o.chuchain")
    assert back.max_length == 3 and back.stage(3) == chain.stage(3)


def test_generator_roundtrip(tmp_path):
    text = emit_generator("order-chain", {"window": 3})
    assert parse_generator(text) == ("order-chain", {"window": "3"})
    chain = generator_from_text(text)
    assert chain.stage(3) == order_chain(3).stage(3)
    write_text(tmp_path / "g.chugen", text)
    assert load_chain(tmp_path / "g.chugen").max_length == 3


def test_load_autodetects_json(tmp_path):
    s = ChuSpace.from_rows([[1, 0]], ["a"], ["x", "y"])
    (tmp_path / "s.json").write_text(json.dumps(space_to_json(s)))
    assert load_space(tmp_path / "s.json") == s
