"""Text and JSON serialisation for spaces, morphisms and chains.

Text layout of a space (``chu v1``)::

    chu v1
    sigma 0 1
    objects a1 a2
    attributes x1 x2
    matrix
    0 1
    1 1

Keyword lines keep their keyword when the label list is empty, and a space
without attributes has one empty matrix line per object.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

import numpy as np

from .chain import CHAIN_CATEGORIES, ChainGenerator
from .core import Alphabet, ChuSpace
from .errors import ContractViolation, FormatError
from .morph import ChuMorphism

SPACE_HEADER = "chu v1"
MORPH_HEADER = "chumorph v1"
CHAIN_HEADER = "chuchain v1"
GEN_HEADER = "chugen v1"


def _line(keyword: str, items) -> str:
    items = list(items)
    return " ".join([keyword] + items) if items else keyword


# ---------------------------------------------------------------------------
# spaces


def space_lines(space: ChuSpace) -> list[str]:
    sym = space.alphabet.symbols
    lines = [SPACE_HEADER, _line("sigma", sym), _line("objects", space.objects),
             _line("attributes", space.attributes), "matrix"]
    lines += [" ".join(sym[v] for v in row) for row in space.matrix]
    return lines


def emit_space(space: ChuSpace) -> str:
    return "\n".join(space_lines(space)) + "\n"


class _Lines:
    def __init__(self, text: str, source: str = "<text>"):
        if "\r" in text:
            raise FormatError(f"{source}: line endings must be LF")
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0
        self.source = source

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def next(self) -> str:
        if self.done():
            raise FormatError(f"{self.source}: unexpected end of input")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self) -> str | None:
        return None if self.done() else self.lines[self.pos]

    def fail(self, msg: str):
        raise FormatError(f"{self.source}:{self.pos}: {msg}")


def _keyword(lines: _Lines, keyword: str) -> list[str]:
    line = lines.next()
    parts = line.split(" ")
    if parts[0] != keyword:
        lines.fail(f"expected {keyword!r}, got {line!r}")
    if line != _line(keyword, parts[1:]) or any(p == "" for p in parts[1:]):
        lines.fail("tokens must be separated by single spaces")
    return parts[1:]


def _read_space(lines: _Lines) -> ChuSpace:
    if lines.next() != SPACE_HEADER:
        lines.fail(f"expected {SPACE_HEADER!r}")
    sigma = _keyword(lines, "sigma")
    objects = _keyword(lines, "objects")
    attributes = _keyword(lines, "attributes")
    if lines.next() != "matrix":
        lines.fail("expected 'matrix'")
    try:
        alphabet = Alphabet(tuple(sigma))
    except ContractViolation as exc:
        raise FormatError(str(exc)) from exc
    rows = []
    for _ in objects:
        line = lines.next()
        cells = line.split(" ") if line else []
        if len(cells) != len(attributes):
            lines.fail(f"row has {len(cells)} entries, expected {len(attributes)}")
        try:
            rows.append([alphabet.index(c) for c in cells])
        except ContractViolation as exc:
            lines.fail(str(exc))
    mat = np.array(rows, dtype=np.int8).reshape(len(objects), len(attributes))
    try:
        return ChuSpace(alphabet, tuple(objects), tuple(attributes), mat)
    except FormatError:
        raise
    except ContractViolation as exc:
        raise FormatError(f"{lines.source}: {exc}") from exc


def parse_space(text: str, source: str = "<text>") -> ChuSpace:
    lines = _Lines(text, source)
    space = _read_space(lines)
    if not lines.done():
        lines.fail("trailing content after matrix")
    return space


def space_to_json(space: ChuSpace) -> dict:
    sym = space.alphabet.symbols
    return {"format": "chu-v1", "sigma": list(sym), "objects": list(space.objects),
            "attributes": list(space.attributes),
            "matrix": [[sym[v] for v in row] for row in space.matrix]}


def space_from_json(data: dict) -> ChuSpace:
    if not isinstance(data, dict) or data.get("format") != "chu-v1":
        raise FormatError("expected a chu-v1 JSON object")
    try:
        alphabet = Alphabet(tuple(data["sigma"]))
        objs, attrs = tuple(data["objects"]), tuple(data["attributes"])
        rows = data["matrix"]
        if len(rows) != len(objs) or any(len(r) != len(attrs) for r in rows):
            raise FormatError("matrix shape does not match the label lists")
        mat = np.array([[alphabet.index(c) for c in r] for r in rows], dtype=np.int8).reshape(len(objs), len(attrs))
        return ChuSpace(alphabet, objs, attrs, mat)
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from exc
    except FormatError:
        raise
    except ContractViolation as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# morphisms


def _pairs(mapping: dict[str, str]) -> list[str]:
    return [f"{k}->{v}" for k, v in mapping.items()]


def morphism_lines(m: ChuMorphism, source_ref: str | None = None, target_ref: str | None = None) -> list[str]:
    """``*_ref`` replaces the inline block with ``source <ref>`` (a path or ``ref k``)."""
    lines = [MORPH_HEADER]
    for key, space, ref in (("source", m.source, source_ref), ("target", m.target, target_ref)):
        if ref is None:
            lines.append(f"{key} inline")
            lines += space_lines(space)
        else:
            lines.append(f"{key} {ref}")
    lines.append(_line("forward", _pairs(m.forward_labels())))
    lines.append(_line("backward", _pairs(m.backward_labels())))
    return lines


def emit_morphism(m: ChuMorphism, source_ref: str | None = None, target_ref: str | None = None) -> str:
    return "\n".join(morphism_lines(m, source_ref, target_ref)) + "\n"


def _read_map(lines: _Lines, keyword: str) -> dict[str, str]:
    out = {}
    for tok in _keyword(lines, keyword):
        if tok.count("->") != 1:
            lines.fail(f"bad mapping token {tok!r}")
        k, v = tok.split("->")
        if not k or not v:
            lines.fail(f"bad mapping token {tok!r}")
        if k in out:
            lines.fail(f"{k!r} mapped twice")
        out[k] = v
    return out


def _read_endpoint(lines: _Lines, key: str, base: Path | None, allow_ref: bool) -> ChuSpace | int:
    """A space, or the 1-based stage number of a ``ref`` inside a chain file."""
    parts = _keyword(lines, key)
    if parts == ["inline"]:
        return _read_space(lines)
    if len(parts) == 2 and parts[0] == "ref":
        if not allow_ref:
            lines.fail("'ref' is only valid inside a chain file")
        try:
            return int(parts[1])
        except ValueError:
            lines.fail(f"bad reference {parts[1]!r}")
    if len(parts) == 1:
        path = Path(parts[0])
        if base is not None and not path.is_absolute():
            path = base / path
        return load_space(path)
    lines.fail(f"bad {key} line")


def _read_morphism_parts(lines: _Lines, base: Path | None, allow_ref: bool):
    if lines.next() != MORPH_HEADER:
        lines.fail(f"expected {MORPH_HEADER!r}")
    source = _read_endpoint(lines, "source", base, allow_ref)
    target = _read_endpoint(lines, "target", base, allow_ref)
    return source, target, _read_map(lines, "forward"), _read_map(lines, "backward")


def _build_morphism(source: ChuSpace, target: ChuSpace, fwd, bwd, where: str) -> ChuMorphism:
    try:
        return ChuMorphism.from_labels(source, target, fwd, bwd)
    except ContractViolation as exc:
        raise FormatError(f"{where}: {exc}") from exc


def parse_morphism(text: str, source: str = "<text>", base: Path | None = None) -> ChuMorphism:
    lines = _Lines(text, source)
    src, tgt, fwd, bwd = _read_morphism_parts(lines, base, False)
    if not lines.done():
        lines.fail("trailing content after morphism")
    return _build_morphism(src, tgt, fwd, bwd, source)


def morphism_to_json(m: ChuMorphism) -> dict:
    return {"format": "chumorph-v1", "source": space_to_json(m.source), "target": space_to_json(m.target),
            "forward": m.forward_labels(), "backward": m.backward_labels()}


def morphism_from_json(data: dict) -> ChuMorphism:
    if not isinstance(data, dict) or data.get("format") != "chumorph-v1":
        raise FormatError("expected a chumorph-v1 JSON object")
    try:
        src, tgt = space_from_json(data["source"]), space_from_json(data["target"])
        return ChuMorphism.from_labels(src, tgt, data["forward"], data["backward"])
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from exc
    except FormatError:
        raise
    except ContractViolation as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# chains


def emit_chain(chain: ChainGenerator, depth: int | None = None) -> str:
    if chain.kind == "explicit" and depth is None:
        depth = chain.max_length
    if depth is None:
        raise ContractViolation("generated chains need a depth to be written out")
    lines = [CHAIN_HEADER, f"category {chain.category}"]
    for i in range(1, depth + 1):
        lines.append("space")
        lines += space_lines(chain.stage(i))
        if i < depth:
            lines.append("morphism")
            lines += morphism_lines(chain.link(i), f"ref {i}", f"ref {i + 1}")
    return "\n".join(lines) + "\n"


def parse_chain(text: str, source: str = "<text>", base: Path | None = None) -> ChainGenerator:
    lines = _Lines(text, source)
    if lines.next() != CHAIN_HEADER:
        lines.fail(f"expected {CHAIN_HEADER!r}")
    cat = _keyword(lines, "category")
    if len(cat) != 1 or cat[0] not in CHAIN_CATEGORIES:
        lines.fail(f"category must be one of {CHAIN_CATEGORIES}")
    spaces: list[ChuSpace] = []
    pending: list = []
    while not lines.done():
        kind = lines.next()
        if kind == "space":
            if len(spaces) != len(pending):
                lines.fail("two spaces in a row without a morphism between them")
            spaces.append(_read_space(lines))
        elif kind == "morphism":
            if len(spaces) != len(pending) + 1:
                lines.fail("morphism block must follow a space block")
            pending.append(_read_morphism_parts(lines, base, True))
        else:
            lines.fail(f"expected 'space' or 'morphism', got {kind!r}")
    if not spaces or len(spaces) != len(pending) + 1:
        lines.fail("a chain needs spaces joined by morphisms, ending with a space")

    def resolve(end):
        if isinstance(end, int):
            if not 1 <= end <= len(spaces):
                raise FormatError(f"{source}: reference {end} out of range")
            return spaces[end - 1]
        return end

    links = [_build_morphism(resolve(a), resolve(b), f, g, source) for a, b, f, g in pending]
    for i, m in enumerate(links):
        if m.source != spaces[i] or m.target != spaces[i + 1]:
            raise FormatError(f"{source}: morphism {i + 1} does not join spaces {i + 1} and {i + 2}")
    return ChainGenerator.explicit(spaces, links, cat[0])


def chain_to_json(chain: ChainGenerator, depth: int | None = None) -> dict:
    if chain.kind == "explicit" and depth is None:
        depth = chain.max_length
    return {"format": "chuchain-v1", "category": chain.category,
            "spaces": [space_to_json(s) for s in chain.stages(depth)],
            "morphisms": [{"forward": m.forward_labels(), "backward": m.backward_labels()}
                          for m in chain.links(depth)]}


def chain_from_json(data: dict) -> ChainGenerator:
    if not isinstance(data, dict) or data.get("format") != "chuchain-v1":
        raise FormatError("expected a chuchain-v1 JSON object")
    try:
        spaces = [space_from_json(s) for s in data["spaces"]]
        links = [ChuMorphism.from_labels(spaces[i], spaces[i + 1], m["forward"], m["backward"])
                 for i, m in enumerate(data["morphisms"])]
        if len(links) != len(spaces) - 1:
            raise FormatError("need exactly one morphism between consecutive spaces")
        return ChainGenerator.explicit(spaces, links, data["category"])
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from exc
    except FormatError:
        raise
    except ContractViolation as exc:
        raise FormatError(str(exc)) from exc


def emit_generator(rule: str, params: dict) -> str:
    lines = [GEN_HEADER, f"rule {rule}"] + [f"param {k} {v}" for k, v in params.items()]
    return "\n".join(lines) + "\n"


def parse_generator(text: str, source: str = "<text>") -> tuple[str, dict[str, str]]:
    lines = _Lines(text, source)
    if lines.next() != GEN_HEADER:
        lines.fail(f"expected {GEN_HEADER!r}")
    rule = _keyword(lines, "rule")
    if len(rule) != 1:
        lines.fail("rule takes one id")
    params = {}
    while not lines.done():
        p = _keyword(lines, "param")
        if len(p) != 2:
            lines.fail("param takes a key and a value")
        params[p[0]] = p[1]
    return rule[0], params


def generator_from_text(text: str, source: str = "<text>") -> ChainGenerator:
    from .gallery import generator_chain

    rule, params = parse_generator(text, source)
    try:
        window = int(params.get("window", "4"))
    except ValueError as exc:
        raise FormatError(f"{source}: window must be an integer") from exc
    return generator_chain(rule, window)


# ---------------------------------------------------------------------------
# files


def _read(path) -> tuple[str, Path]:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8"), path.parent
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _json_or_none(text: str):
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad JSON: {exc}") from exc
    return None


def load_space(path) -> ChuSpace:
    text, _ = _read(path)
    data = _json_or_none(text)
    return space_from_json(data) if data is not None else parse_space(text, str(path))


def load_morphism(path) -> ChuMorphism:
    text, base = _read(path)
    data = _json_or_none(text)
    return morphism_from_json(data) if data is not None else parse_morphism(text, str(path), base)


def load_chain(path) -> ChainGenerator:
    text, base = _read(path)
    data = _json_or_none(text)
    if data is not None:
        return chain_from_json(data)
    if text.startswith(GEN_HEADER):
        return generator_from_text(text, str(path))
    return parse_chain(text, str(path), base)


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def iter_space_files(directory) -> Iterator[Path]:
    yield from sorted(Path(directory).glob("*.chu"))
