"""Omega-chains of Chu spaces and their colimits.

Chains are either explicit (a finite list of stages and connecting
morphisms) or generated by a rule that produces stage ``i`` on demand.  The
colimit of a chain whose forward maps are inclusions has the union of the
object sets as objects and compatible attribute sequences (threads) as
attributes.  A depth-``k`` colimit only looks at the first ``k`` stages; for an
explicit chain of length ``k`` this is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import ChuSpace, ENUMERATION_BUDGET, is_biextensional, is_extensional, is_separable
from .errors import (
    BudgetExceeded,
    CategoryMembershipViolated,
    ContractViolation,
    ForwardNotInjective,
    InvalidCocone,
    InvalidLeg,
    NotBiextensionalChain,
    WindowExhausted,
)
from .morph import ChuMorphism, compose, validate

CHAIN_CATEGORIES = ("iC", "iE", "iB")


class ChainGenerator:
    """A finite or rule-generated sequence ``C_1 -> C_2 -> ...`` (stages are 1-based)."""

    def __init__(self, category: str, *, spaces: Sequence[ChuSpace] = (), links: Sequence[ChuMorphism] = (),
                 stage_fn: Callable[[int], ChuSpace] | None = None,
                 link_fn: Callable[[int], ChuMorphism] | None = None,
                 max_length: int | None = None, rule_id: str | None = None,
                 params: dict | None = None, windowed: bool = False):
        if category not in CHAIN_CATEGORIES:
            raise ContractViolation(f"category claim must be one of {CHAIN_CATEGORIES}")
        self.category = category
        self.rule_id = rule_id
        self.params = dict(params or {})
        self.windowed = windowed
        self._stage_fn = stage_fn
        self._link_fn = link_fn
        self._spaces = list(spaces)
        self._links = list(links)
        if stage_fn is None:
            if not self._spaces:
                raise ContractViolation("an explicit chain needs at least one stage")
            if len(self._links) != len(self._spaces) - 1:
                raise ContractViolation("an explicit chain of n stages needs n-1 connecting morphisms")
            for i, link in enumerate(self._links):
                if link.source != self._spaces[i] or link.target != self._spaces[i + 1]:
                    raise ContractViolation(f"morphism {i + 1} does not connect stages {i + 1} and {i + 2}")
            self.max_length = len(self._spaces)
        else:
            self.max_length = max_length
        self._stage_cache: dict[int, ChuSpace] = {}
        self._link_cache: dict[int, ChuMorphism] = {}

    @classmethod
    def explicit(cls, spaces, links, category: str = "iC") -> "ChainGenerator":
        return cls(category, spaces=spaces, links=links)

    @classmethod
    def generated(cls, stage_fn, link_fn, category: str, max_length: int | None = None,
                  rule_id: str | None = None, params: dict | None = None,
                  windowed: bool = False) -> "ChainGenerator":
        return cls(category, stage_fn=stage_fn, link_fn=link_fn, max_length=max_length,
                   rule_id=rule_id, params=params, windowed=windowed)

    @property
    def kind(self) -> str:
        return "explicit" if self._stage_fn is None else "generated"

    def _check_index(self, i: int) -> None:
        if i < 1:
            raise ContractViolation("stages are numbered from 1")
        if self.max_length is not None and i > self.max_length:
            raise WindowExhausted(f"stage {i} requested but the chain has {self.max_length} stages")

    def stage(self, i: int) -> ChuSpace:
        self._check_index(i)
        if self._stage_fn is None:
            return self._spaces[i - 1]
        if i not in self._stage_cache:
            self._stage_cache[i] = self._stage_fn(i)
        return self._stage_cache[i]

    def link(self, i: int) -> ChuMorphism:
        """The connecting morphism ``C_i -> C_{i+1}``."""
        self._check_index(i + 1)
        if self._stage_fn is None:
            return self._links[i - 1]
        if i not in self._link_cache:
            self._link_cache[i] = self._link_fn(i)
        return self._link_cache[i]

    def stages(self, depth: int) -> list[ChuSpace]:
        return [self.stage(i) for i in range(1, depth + 1)]

    def links(self, depth: int) -> list[ChuMorphism]:
        return [self.link(i) for i in range(1, depth)]

    def prefix(self, depth: int) -> "ChainGenerator":
        """The first ``depth`` stages as an explicit chain."""
        return ChainGenerator.explicit(self.stages(depth), self.links(depth), self.category)

    def __repr__(self):
        return (f"ChainGenerator(kind={self.kind}, category={self.category}, "
                f"length={self.max_length}, rule={self.rule_id})")


def link_is_monic(link: ChuMorphism, category: str) -> bool:
    if category == "iC":
        return link.forward_injective and link.backward_surjective
    return link.forward_injective


def validate_chain(chain: ChainGenerator, depth: int | None = None) -> list[str]:
    """Problems found in the first ``depth`` stages; an empty list means valid."""
    depth = depth or chain.max_length
    if depth is None:
        raise ContractViolation("a depth is required for unbounded chains")
    problems = []
    for i in range(1, depth + 1):
        s = chain.stage(i)
        if chain.category == "iE" and not is_extensional(s):
            problems.append(f"stage {i} is not extensional")
        if chain.category == "iB" and not is_biextensional(s):
            problems.append(f"stage {i} is not biextensional")
    for i in range(1, depth):
        link = chain.link(i)
        if not validate(link):
            problems.append(f"morphism {i} violates adjointness")
        if not link_is_monic(link, chain.category):
            problems.append(f"morphism {i} is not monic in {chain.category}")
    return problems


# ---------------------------------------------------------------------------
# normalisation


def _is_inclusion(link: ChuMorphism) -> bool:
    return all(link.target.objects[b] == a for a, b in zip(link.source.objects, link.forward))


def _relabel_step(prev: ChuSpace, link: ChuMorphism) -> tuple[ChuSpace, ChuMorphism]:
    """Relabel the target of ``link`` so that its forward map becomes a label inclusion."""
    if not link.forward_injective:
        raise ForwardNotInjective("forward maps must be injective to normalise to inclusions")
    if link.source == prev and _is_inclusion(link):
        return link.target, link
    tgt = link.target
    labels: list[str | None] = [None] * len(tgt.objects)
    for a, b in zip(prev.objects, link.forward):
        labels[b] = a
    taken = set(prev.objects)
    for b, lab in enumerate(labels):
        if lab is None:
            new = tgt.objects[b]
            while new in taken:
                new += "'"
            taken.add(new)
            labels[b] = new
    relabelled = tgt.relabel(objects=labels)
    return relabelled, ChuMorphism(prev, relabelled, link.forward, link.backward)


def normalize_to_inclusions(chain: ChainGenerator) -> ChainGenerator:
    """Isomorphic chain whose forward maps keep object labels (set inclusions).

    Objects not hit by a forward map keep their label unless it collides with
    an inherited one, in which case primes are appended.
    """
    if chain.kind == "explicit":
        spaces = [chain.stage(1)]
        links = []
        for i in range(1, chain.max_length):
            nxt, link = _relabel_step(spaces[-1], chain.link(i))
            spaces.append(nxt)
            links.append(link)
        out = ChainGenerator.explicit(spaces, links, chain.category)
        out.windowed = chain.windowed
        return out

    cache: dict[int, tuple[ChuSpace, ChuMorphism | None]] = {}

    def build(i: int):
        if i not in cache:
            if i == 1:
                cache[1] = (chain.stage(1), None)
            else:
                prev, _ = build(i - 1)
                cache[i] = _relabel_step(prev, chain.link(i - 1))
        return cache[i]

    return ChainGenerator.generated(lambda i: build(i)[0], lambda i: build(i + 1)[1], chain.category,
                                    chain.max_length, chain.rule_id, chain.params, chain.windowed)


# ---------------------------------------------------------------------------
# colimits


@dataclass
class ColimitResult:
    space: ChuSpace
    injections: list[ChuMorphism]
    depth: int
    stabilized: bool
    exact: bool
    threads: list[tuple[int, ...]]
    chain: ChainGenerator = field(repr=False)
    windowed: bool = False

    @property
    def thread_count(self) -> int:
        return len(self.threads)


def thread_label(chain: ChainGenerator, thread: Sequence[int]) -> str:
    return "|".join(chain.stage(i + 1).attributes[x] for i, x in enumerate(thread))


def _threads(chain: ChainGenerator, depth: int) -> list[tuple[int, ...]]:
    """All compatible sequences (x_1..x_depth), sorted lexicographically by index."""
    out = []
    for last in range(len(chain.stage(depth).attributes)):
        entries = [last]
        for i in range(depth - 1, 0, -1):
            entries.append(chain.link(i).backward[entries[-1]])
        out.append(tuple(reversed(entries)))
    out.sort()
    return out


def _object_union(chain: ChainGenerator, depth: int) -> tuple[list[str], dict[str, int]]:
    objects: list[str] = []
    first_stage: dict[str, int] = {}
    for i in range(1, depth + 1):
        for a in chain.stage(i).objects:
            if a not in first_stage:
                first_stage[a] = i
                objects.append(a)
    return objects, first_stage


def colimit(chain: ChainGenerator, depth: int | None = None, budget: int = ENUMERATION_BUDGET) -> ColimitResult:
    """Colimit (explicit chain at full depth) or depth-k approximant.

    Objects are the union of the stage object sets, attributes the length-k
    threads, ``r(a, t) = r_i(a, t_i)`` for the first stage ``i`` containing
    ``a``.  The injections send a thread to its i-th entry.
    """
    if depth is None:
        if chain.max_length is None:
            raise ContractViolation("a depth is required for unbounded chains")
        depth = chain.max_length
    if depth < 1:
        raise ContractViolation("depth must be at least 1")
    norm = normalize_to_inclusions(chain)
    if len(norm.stage(depth).attributes) > budget:
        raise BudgetExceeded("thread count exceeds budget")
    threads = _threads(norm, depth)
    objects, first_stage = _object_union(norm, depth)
    alphabet = norm.stage(1).alphabet
    mat = np.zeros((len(objects), len(threads)), dtype=np.int8)
    for r, a in enumerate(objects):
        i = first_stage[a]
        st = norm.stage(i)
        ai = st.object_index(a)
        for c, t in enumerate(threads):
            mat[r, c] = st.matrix[ai, t[i - 1]]
    labels = [thread_label(norm, t) for t in threads]
    space = ChuSpace(alphabet, tuple(objects), tuple(labels), mat)
    pos = {a: k for k, a in enumerate(objects)}
    injections = []
    for i in range(1, depth + 1):
        st = norm.stage(i)
        injections.append(ChuMorphism(st, space, tuple(pos[a] for a in st.objects),
                                      tuple(t[i - 1] for t in threads)))
    stabilized = False
    if depth >= 2:
        prev_count = len(norm.stage(depth - 1).attributes)
        stabilized = prev_count == len(threads) and norm.link(depth - 1).backward_surjective
    exact = chain.kind == "explicit" and depth == chain.max_length
    result = ColimitResult(space, injections, depth, stabilized, exact, threads, norm, chain.windowed)
    if not validate_cocone(norm, space, injections, depth):
        raise AssertionError("colimit injections violate the cocone law")
    return result


def validate_cocone(chain: ChainGenerator, apex: ChuSpace, legs: Sequence[ChuMorphism], upto: int | None = None) -> bool:
    """``legs[i+1] . phi_i == legs[i]`` for the first ``upto`` legs."""
    upto = len(legs) if upto is None else upto
    if upto > len(legs):
        raise InvalidLeg(f"{upto} legs requested, {len(legs)} given")
    legs = _resource_legs(chain, apex, legs[:upto])
    for i in range(upto - 1):
        if compose(legs[i + 1], chain.link(i + 1)) != legs[i]:
            return False
    return True


def _resource_legs(chain: ChainGenerator, apex: ChuSpace, legs: Sequence[ChuMorphism]) -> list[ChuMorphism]:
    """Re-attach legs to the chain's own stage values (labels may differ after normalisation)."""
    out = []
    for i, leg in enumerate(legs, start=1):
        st = chain.stage(i)
        if leg.target != apex:
            raise InvalidLeg(f"leg {i} does not end at the apex")
        if leg.source.shape != st.shape or not np.array_equal(leg.source.matrix, st.matrix):
            raise InvalidLeg(f"leg {i} does not start at stage {i}")
        leg = leg if leg.source == st else ChuMorphism(st, apex, leg.forward, leg.backward)
        if not validate(leg):
            raise InvalidLeg(f"leg {i} is not a morphism")
        out.append(leg)
    return out


def mediate(result: ColimitResult, other_apex: ChuSpace, other_legs: Sequence[ChuMorphism]) -> ChuMorphism | None:
    """The morphism from the colimit to another cocone's apex.

    Forward: ``a -> psi'_i(a)`` for the first stage containing ``a``.  Backward:
    ``x' -> (psi'_1(x'), ..., psi'_k(x'))`` read as a thread; ``None`` when that
    thread is not an attribute of the (truncated) colimit.
    """
    depth = result.depth
    if len(other_legs) < depth:
        raise InvalidCocone(f"{depth} legs needed, {len(other_legs)} given")
    chain = result.chain
    try:
        legs = _resource_legs(chain, other_apex, other_legs[:depth])
    except InvalidLeg as exc:
        raise InvalidCocone(str(exc)) from exc
    for i in range(depth - 1):
        if compose(legs[i + 1], chain.link(i + 1)) != legs[i]:
            raise InvalidCocone(f"cocone law fails between legs {i + 1} and {i + 2}")
    _, first_stage = _object_union(chain, depth)
    forward = []
    for a in result.space.objects:
        i = first_stage[a]
        st = chain.stage(i)
        forward.append(legs[i - 1].forward[st.object_index(a)])
    index = {t: k for k, t in enumerate(result.threads)}
    backward = []
    for y in range(len(other_apex.attributes)):
        t = tuple(legs[i].backward[y] for i in range(depth))
        if t not in index:
            return None
        backward.append(index[t])
    return ChuMorphism(result.space, other_apex, tuple(forward), tuple(backward))


def check_extensionality_preserved(result: ColimitResult) -> bool:
    return is_extensional(result.space)


@dataclass
class SeparationReport:
    separable: bool
    pairs_checked: int
    unseparated: list[tuple[str, str]]
    witnesses: dict[tuple[str, str], str]
    colimit_separable: bool


def separating_thread(chain: ChainGenerator, a: str, b: str, depth: int) -> tuple[int, ...] | None:
    """Branch search in the tree of attributes distinguishing ``a`` from ``b``.

    Level ``i`` holds the attributes of stage ``i`` on which the rows of ``a``
    and ``b`` differ, starting at the first stage containing both; an edge joins
    ``x_{i+1}`` to ``phi_i(x_{i+1})``.  A node at level ``depth`` yields the
    lex-least separating thread.
    """
    m = next(i for i in range(1, depth + 1)
             if a in chain.stage(i).objects and b in chain.stage(i).objects)
    st = chain.stage(m)
    ra, rb = st.matrix[st.object_index(a)], st.matrix[st.object_index(b)]
    frontier = {x for x in range(len(st.attributes)) if ra[x] != rb[x]}
    for i in range(m, depth):
        link = chain.link(i)
        frontier = {y for y, x in enumerate(link.backward) if x in frontier}
        if not frontier:
            return None
    if not frontier:
        return None
    last = min(frontier)
    entries = [last]
    for i in range(depth - 1, 0, -1):
        entries.append(chain.link(i).backward[entries[-1]])
    return tuple(reversed(entries))


def check_separability_preserved(result: ColimitResult) -> SeparationReport:
    """Every pair of colimit objects is split by some thread of the approximant."""
    chain = result.chain
    for i in range(1, result.depth + 1):
        if not is_biextensional(chain.stage(i)):
            raise NotBiextensionalChain(f"stage {i} is not biextensional")
    objects = result.space.objects
    unseparated = []
    witnesses = {}
    pairs = 0
    for p in range(len(objects)):
        for q in range(p + 1, len(objects)):
            pairs += 1
            t = separating_thread(chain, objects[p], objects[q], result.depth)
            if t is None:
                unseparated.append((objects[p], objects[q]))
            else:
                witnesses[(objects[p], objects[q])] = thread_label(chain, t)
    return SeparationReport(not unseparated, pairs, unseparated, witnesses, is_separable(result.space))


def require_category(chain: ChainGenerator, depth: int, category: str) -> None:
    problems = validate_chain(chain, depth)
    if problems:
        raise CategoryMembershipViolated("; ".join(problems))
