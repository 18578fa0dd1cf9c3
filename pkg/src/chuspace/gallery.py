"""Named structures as windowed generators, plus the no-colimit demo.

The infinite structures behind the positive and negative results are only
ever materialised through a finite window ``W``; chains built that way carry
``windowed=True``.  Integers used as labels are 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .chain import ChainGenerator, validate_cocone
from .core import BINARY, Alphabet, ChuSpace, missing_column
from .errors import ContractViolation, NotStrictlyIncreasing
from .morph import ChuMorphism, compose, enumerate_morphisms, validate

GENERATORS = ("order-chain", "divisibility-M", "discrete-family", "subset-chain", "nondiscrete-witness-chain")


def _labels(n: int, prefix: str = "") -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(1, n + 1))


# ---------------------------------------------------------------------------
# order matrices


def order_space(n: int, extra_top: bool = False) -> ChuSpace:
    """({1..n}, <=, {1..n}); with ``extra_top`` an all-ones attribute ``t`` is appended."""
    mat = np.array([[1 if a <= x else 0 for x in range(1, n + 1)] for a in range(1, n + 1)], dtype=np.int8)
    mat = mat.reshape(n, n)
    attrs = _labels(n)
    if extra_top:
        mat = np.hstack([mat, np.ones((n, 1), dtype=np.int8)])
        attrs = attrs + ("t",)
    return ChuSpace(BINARY, _labels(n), attrs, mat)


def _order_link(i: int) -> ChuMorphism:
    # phi_i: forward inclusion, backward i+1 -> i and identity below
    return ChuMorphism(order_space(i), order_space(i + 1), tuple(range(i)),
                       tuple(min(y, i - 1) for y in range(i + 1)))


def order_chain(window: int) -> ChainGenerator:
    """Stages ({1..i}, <=, {1..i}) for i <= window, monic in iC."""
    if window < 1:
        raise ContractViolation("window must be at least 1")
    return ChainGenerator.generated(order_space, _order_link, "iC", max_length=window,
                                    rule_id="order-chain", params={"window": window}, windowed=True)


def order_cocones(window: int):
    """The two cocones over the first ``window`` order-chain stages.

    Into C_W = ({1..W}, <=, {1..W}) with backward maps x -> min(x, i), and into
    C'_W, which adds an all-ones attribute ``t`` sent to ``i``.
    """
    apex = order_space(window)
    apex_t = order_space(window, extra_top=True)
    legs, legs_t = [], []
    for i in range(1, window + 1):
        st = order_space(i)
        bwd = tuple(min(x, i - 1) for x in range(window))
        legs.append(ChuMorphism(st, apex, tuple(range(i)), bwd))
        legs_t.append(ChuMorphism(st, apex_t, tuple(range(i)), bwd + (i - 1,)))
    return apex, legs, apex_t, legs_t


# ---------------------------------------------------------------------------
# divisibility matrix


def divisibility_entry(a: int, x: int, i: int) -> int:
    return 1 if (x + i - 1) % a == 0 else 0


def divisibility_stage(i: int, window: int) -> ChuSpace:
    """Objects {1..W}, attributes {1..W-i+1}, r_i(a, x) = 1 iff a divides x+i-1."""
    width = max(window - i + 1, 0)
    mat = np.array([[divisibility_entry(a, x, i) for x in range(1, width + 1)] for a in range(1, window + 1)],
                   dtype=np.int8).reshape(window, width)
    return ChuSpace(BINARY, _labels(window), _labels(width), mat)


def divisibility_chain(window: int) -> ChainGenerator:
    """Windowed divisibility chain: forward identity, backward x -> x+1.

    The attribute window shrinks by one per stage so every backward map is
    total; stage ``W+1`` has no attributes and is the last one available.
    """
    if window < 1:
        raise ContractViolation("window must be at least 1")

    def link(i: int) -> ChuMorphism:
        src, tgt = divisibility_stage(i, window), divisibility_stage(i + 1, window)
        return ChuMorphism(src, tgt, tuple(range(window)), tuple(y + 1 for y in range(len(tgt.attributes))))

    return ChainGenerator.generated(lambda i: divisibility_stage(i, window), link, "iE",
                                    max_length=window + 1, rule_id="divisibility-M",
                                    params={"window": window}, windowed=True)


# ---------------------------------------------------------------------------
# subset chains


def subset_chain(sets: Sequence[Iterable]) -> ChainGenerator:
    """Stages (A_i, r_i, {1..i}) with r_i(a, j) = 1 iff a in A_j; backward j -> min(j, i)."""
    sets = [[str(a) for a in s] for s in sets]
    if not sets:
        raise ContractViolation("at least one set is required")
    for k, s in enumerate(sets):
        if len(set(s)) != len(s):
            raise ContractViolation(f"set {k + 1} lists an element twice")
    for k in range(1, len(sets)):
        prev, cur = set(sets[k - 1]), set(sets[k])
        if not prev < cur:
            raise NotStrictlyIncreasing(f"set {k} is not a proper subset of set {k + 1}")
    order: list[str] = []
    for s in sets:
        for a in s:
            if a not in order:
                order.append(a)
    members = [set(s) for s in sets]

    def stage(i: int) -> ChuSpace:
        objs = [a for a in order if a in members[i - 1]]
        mat = np.array([[1 if a in members[j - 1] else 0 for j in range(1, i + 1)] for a in objs],
                       dtype=np.int8).reshape(len(objs), i)
        return ChuSpace(BINARY, tuple(objs), _labels(i), mat)

    spaces = [stage(i) for i in range(1, len(sets) + 1)]
    links = []
    for i in range(1, len(sets)):
        src, tgt = spaces[i - 1], spaces[i]
        links.append(ChuMorphism(src, tgt, tuple(tgt.object_index(a) for a in src.objects),
                                 tuple(min(j, i - 1) for j in range(i + 1))))
    return ChainGenerator.explicit(spaces, links, "iC")


def column_supports(space: ChuSpace) -> list[frozenset[str]]:
    """Objects carrying a nonzero value in each column, column by column."""
    return [frozenset(a for a, v in zip(space.objects, space.matrix[:, c]) if v != 0)
            for c in range(len(space.attributes))]


# ---------------------------------------------------------------------------
# discrete spaces


def discrete_space(n: int, alphabet: Alphabet = BINARY) -> ChuSpace:
    """Objects 1..n, one attribute per function {1..n} -> Sigma (label joins symbols with '.')."""
    funcs = list(itertools.product(range(len(alphabet)), repeat=n))
    mat = np.array(funcs, dtype=np.int8).reshape(len(funcs), n).T
    labels = tuple(".".join(alphabet.symbols[v] for v in f) if n else "()" for f in funcs)
    return ChuSpace(alphabet, _labels(n), labels, mat)


def discrete_family(window: int, alphabet: Alphabet = BINARY) -> ChainGenerator:
    """Discrete spaces on 1..i; backward maps restrict a function to the first i objects."""
    if window < 1:
        raise ContractViolation("window must be at least 1")
    k = len(alphabet)

    def link(i: int) -> ChuMorphism:
        src, tgt = discrete_space(i, alphabet), discrete_space(i + 1, alphabet)
        # functions are in lex order with the last object fastest, so restriction drops it
        return ChuMorphism(src, tgt, tuple(range(i)), tuple(y // k for y in range(len(tgt.attributes))))

    return ChainGenerator.generated(lambda i: discrete_space(i, alphabet), link, "iC", max_length=window,
                                    rule_id="discrete-family",
                                    params={"window": window, "sigma": ",".join(alphabet.symbols)},
                                    windowed=True)


# ---------------------------------------------------------------------------
# proof scaffolding for the finiteness characterisations


def zero_block(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int8)


def unit_block(rows: int, cols: int, pi: Sequence[int]) -> np.ndarray:
    """Row k has a single 1 in column ``pi[k]``."""
    out = np.zeros((rows, cols), dtype=np.int8)
    for k, c in enumerate(pi):
        out[k, c] = 1
    return out


def divisibility_block(window: int, i: int) -> np.ndarray:
    width = max(window - i + 1, 0)
    return np.array([[divisibility_entry(a, x, i) for x in range(1, width + 1)] for a in range(1, window + 1)],
                    dtype=np.int8).reshape(window, width)


def _fresh_prefix(taken: Iterable[str], prefix: str) -> str:
    taken = set(taken)
    while any(t.startswith(prefix) for t in taken):
        prefix += "_"
    return prefix


@dataclass
class WitnessFixture:
    """A windowed chain, its intended colimit with legs, and a candidate ``phi: F -> colim``."""

    name: str
    chain: ChainGenerator
    apex: ChuSpace
    legs: list[ChuMorphism]
    candidate: ChuSpace
    phi: ChuMorphism
    stages_checked: int
    notes: list[str] = field(default_factory=list)


def nondiscrete_witness_chain(space: ChuSpace, window: int, v: Sequence[str] | None = None) -> WitnessFixture:
    """Block construction used to refute finiteness in iE of a non-discrete space.

    Stage i has objects B + N_W and attributes Y + {m1..m_{W-i+1}}; the blocks are
    s (B x Y), repeated copies of a function v (B x N), zeros (N x Y) and the
    divisibility matrix started at column i (N x N).  The intended colimit keeps
    only Y.  For a discrete space any ``v`` is a column; pass one explicitly.
    """
    B, Y = space.objects, space.attributes
    if v is None:
        v = missing_column(space)
        if v is None:
            raise ContractViolation("space is discrete; supply v explicitly")
    v_idx = [space.alphabet.index(s) for s in v]
    np_ = _fresh_prefix(B, "n")
    mp_ = _fresh_prefix(Y, "m")
    N = _labels(window, np_)

    def stage(i: int) -> ChuSpace:
        width = max(window - i + 1, 0)
        top = np.hstack([space.matrix, np.tile(np.array(v_idx, dtype=np.int8).reshape(-1, 1), (1, width))])
        bottom = np.hstack([zero_block(window, len(Y)), divisibility_block(window, i)])
        mat = np.vstack([top, bottom]) if len(B) else bottom
        return ChuSpace(space.alphabet, B + N, Y + _labels(width, mp_), mat)

    def link(i: int) -> ChuMorphism:
        src, tgt = stage(i), stage(i + 1)
        ny = len(Y)
        width = len(tgt.attributes) - ny
        return ChuMorphism(src, tgt, tuple(range(len(B) + window)),
                           tuple(range(ny)) + tuple(ny + x + 1 for x in range(width)))

    chain = ChainGenerator.generated(stage, link, "iE", max_length=window + 1,
                                     rule_id="nondiscrete-witness-chain", params={"window": window},
                                     windowed=True)
    apex = ChuSpace(space.alphabet, B + N, Y,
                    np.vstack([space.matrix, zero_block(window, len(Y))]) if len(B) else zero_block(window, len(Y)))
    legs = [ChuMorphism(stage(i), apex, tuple(range(len(B) + window)), tuple(range(len(Y))))
            for i in range(1, window + 2)]
    phi = ChuMorphism(space, apex, tuple(range(len(B))), tuple(range(len(Y))))
    return WitnessFixture("nondiscrete-witness-chain", chain, apex, legs, space, phi, window,
                          ["stages beyond W have an empty divisibility window; only stages 1..W are meaningful"])


def repeated_column_fixture(window: int) -> WitnessFixture:
    """Chain from the iC finiteness proof for F = ({*}, 0 0, {y1, y2}).

    Stage i has objects {*}, attributes 1..i, all entries 0; backward maps fix
    everything except i+1 -> 1.  The candidate ``phi`` sends odd attributes of
    the colimit window to y1 and even ones to y2.
    """
    F = ChuSpace.from_rows([[0, 0]], ["*"], ["y1", "y2"])

    def stage(i: int) -> ChuSpace:
        return ChuSpace(BINARY, ("*",), _labels(i), np.zeros((1, i), dtype=np.int8))

    def link(i: int) -> ChuMorphism:
        return ChuMorphism(stage(i), stage(i + 1), (0,), tuple(range(i)) + (0,))

    chain = ChainGenerator.generated(stage, link, "iC", max_length=window, rule_id="repeated-column",
                                     params={"window": window}, windowed=True)
    apex = stage(window)
    legs = [ChuMorphism(stage(i), apex, (0,), tuple(j if j < i else 0 for j in range(window)))
            for i in range(1, window + 1)]
    phi = ChuMorphism(F, apex, (0,), tuple(0 if j % 2 == 0 else 1 for j in range(window)))
    return WitnessFixture("repeated-column", chain, apex, legs, F, phi, max(window - 2, 0),
                          ["the last two stages of the window can absorb the alternation; only i <= W-2 is meaningful"])


def column_pair_fixture(window: int) -> WitnessFixture:
    """Shifted divisibility chain with a constant-one attribute c.

    Stage i: objects {1..W}, attributes {1..W-i+1} + {c}; the intended colimit
    keeps only c.  Candidate: ({1, 2}, (1, 1), {c}) included.
    """
    if window < 2:
        raise ContractViolation("window must be at least 2")

    def stage(i: int) -> ChuSpace:
        block = divisibility_block(window, i)
        mat = np.hstack([block, np.ones((window, 1), dtype=np.int8)])
        return ChuSpace(BINARY, _labels(window), _labels(block.shape[1]) + ("c",), mat)

    def link(i: int) -> ChuMorphism:
        src, tgt = stage(i), stage(i + 1)
        width = len(tgt.attributes) - 1
        return ChuMorphism(src, tgt, tuple(range(window)),
                           tuple(x + 1 for x in range(width)) + (len(src.attributes) - 1,))

    chain = ChainGenerator.generated(stage, link, "iE", max_length=window + 1, rule_id="column-pair",
                                     params={"window": window}, windowed=True)
    apex = ChuSpace(BINARY, _labels(window), ("c",), np.ones((window, 1), dtype=np.int8))
    legs = [ChuMorphism(stage(i), apex, tuple(range(window)), (len(stage(i).attributes) - 1,))
            for i in range(1, window + 2)]
    F = ChuSpace.from_rows([[1], [1]], ["1", "2"], ["c"])
    phi = ChuMorphism(F, apex, (0, 1), (0,))
    return WitnessFixture("column-pair", chain, apex, legs, F, phi, window - 1,
                          ["stage W has the single window column 1, divisible by 1 only"])


def biextensional_witness_chain(space: ChuSpace, window: int, v: Sequence[str] | None = None) -> WitnessFixture:
    """Windowed version of the block construction with copies of Y indexed by J.

    Objects B + J + N_W, attributes Y x J + {m1..}; B x (Y x J) repeats s, the
    rows of J + N carry a unit block through an injection pi into Y x J, B x N
    repeats v, J x N is zero and N x N is the divisibility block.  Only the
    first |J| + W copies (lex order) are kept so that pi is a bijection onto
    them; unused copies would duplicate columns.
    """
    B, Y = space.objects, space.attributes
    if not Y:
        raise ContractViolation("needs a non-empty attribute set")
    if v is None:
        v = missing_column(space)
        if v is None:
            raise ContractViolation("space is discrete; supply v explicitly")
    v_idx = np.array([space.alphabet.index(s) for s in v], dtype=np.int8).reshape(-1, 1)
    k = len(B) + len(Y) + window
    if k + window > len(Y) * k:
        raise ContractViolation("window too large for an injection into the copies of Y")
    jp = _fresh_prefix(B, "j")
    np_ = _fresh_prefix(B, "n")
    mp_ = _fresh_prefix(Y, "m")
    J, N = _labels(k, jp), _labels(window, np_)
    ycopies = tuple(f"{y}@{j}" for j in J for y in Y)[:k + window]
    pi = list(range(k + window))  # J + N -> kept copies, lex order

    def copy_block() -> np.ndarray:
        if not len(B):
            return np.zeros((0, len(ycopies)), dtype=np.int8)
        return np.hstack([space.matrix] * k)[:, :len(ycopies)]

    def stage(i: int) -> ChuSpace:
        width = max(window - i + 1, 0)
        top = np.hstack([copy_block(), np.tile(v_idx, (1, width)) if len(B) else np.zeros((0, width), dtype=np.int8)])
        unit = unit_block(k + window, len(ycopies), pi)
        right = np.vstack([zero_block(k, width), divisibility_block(window, i)])
        mat = np.vstack([top, np.hstack([unit, right])])
        return ChuSpace(space.alphabet, B + J + N, ycopies + _labels(width, mp_), mat)

    def link(i: int) -> ChuMorphism:
        src, tgt = stage(i), stage(i + 1)
        ny = len(ycopies)
        width = len(tgt.attributes) - ny
        return ChuMorphism(src, tgt, tuple(range(len(src.objects))),
                           tuple(range(ny)) + tuple(ny + x + 1 for x in range(width)))

    chain = ChainGenerator.generated(stage, link, "iE", max_length=window + 1,
                                     rule_id="nondiscrete-witness-chain",
                                     params={"window": window, "variant": "biextensional"}, windowed=True)
    apex_top = copy_block()
    apex_mat = np.vstack([apex_top, unit_block(k + window, len(ycopies), pi)])
    apex = ChuSpace(space.alphabet, B + J + N, ycopies, apex_mat)
    legs = [ChuMorphism(stage(i), apex, tuple(range(len(apex.objects))), tuple(range(len(ycopies))))
            for i in range(1, window + 2)]
    # phi: identity on B, (y, j) -> y
    phi = ChuMorphism(space, apex, tuple(range(len(B))), tuple(q % len(Y) for q in range(len(ycopies))))
    return WitnessFixture("biextensional-witness-chain", chain, apex, legs, space, phi, window)


# ---------------------------------------------------------------------------
# the no-colimit demo


@dataclass
class NoColimitReport:
    window: int
    cocone_valid: bool
    cocone_t_valid: bool
    morphisms_searched: int
    commuting: int
    commuting_monic_iC: int
    commuting_forward_injective: int
    ie_mediator_exists: bool
    ie_mediator_commutes: bool
    contradiction_cells: list[int]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def demo_no_colimit_in_iC(window: int) -> NoColimitReport:
    """Exhaustive search for mediating morphisms C'_W -> C_W over the order chain prefix.

    No commuting morphism has a surjective backward map (so none is monic in iC),
    while the morphism with identity forward map and inclusion backward map
    commutes.  ``contradiction_cells`` lists each n < W where r(n+1, n) = 0 but
    the top attribute has r'(n+1, t) = 1, so no attribute n can be sent to t.
    """
    if window < 2:
        raise ContractViolation("window must be at least 2")
    apex, legs, apex_t, legs_t = order_cocones(window)
    prefix = order_chain(window).prefix(window)
    ok = validate_cocone(prefix, apex, legs)
    ok_t = validate_cocone(prefix, apex_t, legs_t)
    searched = commuting = monic = inj = 0
    for psi in enumerate_morphisms(apex_t, apex):
        searched += 1
        if all(compose(psi, legs_t[i]) == legs[i] for i in range(window)):
            commuting += 1
            if psi.forward_injective and psi.backward_surjective:
                monic += 1
            if psi.forward_injective:
                inj += 1
    mediator = ChuMorphism(apex_t, apex, tuple(range(window)), tuple(range(window)))
    med_valid = validate(mediator)
    med_commutes = med_valid and all(compose(mediator, legs_t[i]) == legs[i] for i in range(window))
    t = apex_t.attribute_index("t")
    cells = [n for n in range(1, window)
             if apex.matrix[n, n - 1] == 0 and apex_t.matrix[n, t] == 1]
    return NoColimitReport(window, ok, ok_t, searched, commuting, monic, inj, med_valid, med_commutes, cells)


def generator_chain(gen_id: str, window: int) -> ChainGenerator:
    """Chains addressable by id from the CLI and the chugen file format."""
    if gen_id == "order-chain":
        return order_chain(window)
    if gen_id == "divisibility-M":
        return divisibility_chain(window)
    if gen_id == "discrete-family":
        return discrete_family(window)
    if gen_id == "subset-chain":
        return subset_chain([list(range(1, j + 1)) for j in range(1, window + 1)])
    if gen_id == "nondiscrete-witness-chain":
        F = ChuSpace.from_rows([[1], [1]], ["b1", "b2"], ["c"])
        return nondiscrete_witness_chain(F, window).chain
    raise ContractViolation(f"unknown generator {gen_id!r}; expected one of {GENERATORS}")
