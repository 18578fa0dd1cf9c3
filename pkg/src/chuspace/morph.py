"""Chu morphisms, composition, enumeration and monicity deciders.

A morphism ``(f, g): (A, r, X) -> (B, s, Y)`` has ``f: A -> B`` and
``g: Y -> X`` with ``s(f(a), y) == r(a, g(y))``.  Internally both maps are
tuples of indices: ``forward[i]`` indexes ``target.objects`` and
``backward[j]`` indexes ``source.attributes``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _accel
from .core import (
    ChuSpace,
    ENUMERATION_BUDGET,
    check_same_alphabet,
    is_biextensional,
    is_extensional,
    is_separable,
)
from .errors import BudgetExceeded, CategoryMembershipViolated, CompositionMismatch, ContractViolation

CATEGORIES = ("C", "E", "B", "Separable")
RESTRICTIONS = ("all", "monic-C", "monic-E")


@dataclass(frozen=True)
class ChuMorphism:
    source: ChuSpace
    target: ChuSpace
    forward: tuple[int, ...]
    backward: tuple[int, ...]

    def __post_init__(self):
        fwd = tuple(int(v) for v in self.forward)
        bwd = tuple(int(v) for v in self.backward)
        n_src, n_tgt = len(self.source.objects), len(self.target.objects)
        if len(fwd) != n_src or any(not 0 <= v < n_tgt for v in fwd):
            raise ContractViolation("forward map must send every source object to a target object")
        m_src, m_tgt = len(self.source.attributes), len(self.target.attributes)
        if len(bwd) != m_tgt or any(not 0 <= v < m_src for v in bwd):
            raise ContractViolation("backward map must send every target attribute to a source attribute")
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "backward", bwd)

    @classmethod
    def from_labels(cls, source: ChuSpace, target: ChuSpace,
                    forward: Mapping[str, str], backward: Mapping[str, str]) -> "ChuMorphism":
        missing = set(source.objects) - set(forward)
        if missing:
            raise ContractViolation(f"forward map undefined on {sorted(missing)}")
        missing = set(target.attributes) - set(backward)
        if missing:
            raise ContractViolation(f"backward map undefined on {sorted(missing)}")
        fwd = tuple(target.object_index(forward[a]) for a in source.objects)
        bwd = tuple(source.attribute_index(backward[y]) for y in target.attributes)
        return cls(source, target, fwd, bwd)

    @classmethod
    def identity(cls, space: ChuSpace) -> "ChuMorphism":
        return cls(space, space, tuple(range(len(space.objects))), tuple(range(len(space.attributes))))

    def forward_labels(self) -> dict[str, str]:
        return {a: self.target.objects[i] for a, i in zip(self.source.objects, self.forward)}

    def backward_labels(self) -> dict[str, str]:
        return {y: self.source.attributes[j] for y, j in zip(self.target.attributes, self.backward)}

    @property
    def forward_injective(self) -> bool:
        return len(set(self.forward)) == len(self.forward)

    @property
    def forward_surjective(self) -> bool:
        return len(set(self.forward)) == len(self.target.objects)

    @property
    def backward_injective(self) -> bool:
        return len(set(self.backward)) == len(self.backward)

    @property
    def backward_surjective(self) -> bool:
        return len(set(self.backward)) == len(self.source.attributes)

    def __repr__(self):
        return f"ChuMorphism(forward={self.forward_labels()}, backward={self.backward_labels()})"


def _adjoint(source: ChuSpace, target: ChuSpace, forward, backward) -> bool:
    if not len(forward) or not len(backward):
        return True
    lhs = target.matrix[np.asarray(forward)][:, :]
    rhs = source.matrix[:, np.asarray(backward)]
    return bool(np.array_equal(lhs, rhs))


def validate(m: ChuMorphism) -> bool:
    """Adjointness at every (object, attribute) pair."""
    check_same_alphabet(m.source, m.target)
    return _adjoint(m.source, m.target, m.forward, m.backward)


def compose(m2: ChuMorphism, m1: ChuMorphism) -> ChuMorphism:
    """``m2 . m1``: forward maps compose forwards, backward maps compose backwards."""
    if m1.target != m2.source:
        raise CompositionMismatch("target of the first morphism is not the source of the second")
    forward = tuple(m2.forward[i] for i in m1.forward)
    backward = tuple(m1.backward[j] for j in m2.backward)
    return ChuMorphism(m1.source, m2.target, forward, backward)


def compose_chain(*ms: ChuMorphism) -> ChuMorphism:
    """``compose_chain(m1, m2, m3) == m3 . m2 . m1``."""
    out = ms[0]
    for m in ms[1:]:
        out = compose(m, out)
    return out


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=65536)
def _morphism_table(source: ChuSpace, target: ChuSpace, inj: bool, surj: bool, budget: int):
    na_s, na_t = len(source.objects), len(target.objects)
    if na_s and na_t ** na_s > budget:
        raise BudgetExceeded(f"{na_t}^{na_s} forward maps exceed budget {budget}")
    fwd, bwd, overflow = _accel.morphism_arrays(source.matrix, target.matrix, inj, surj, budget)
    if overflow:
        raise BudgetExceeded(f"more than {budget} morphisms")
    return tuple(map(tuple, fwd.tolist())), tuple(map(tuple, bwd.tolist()))


def enumerate_morphisms(source: ChuSpace, target: ChuSpace, restrict: str = "all",
                        budget: int = ENUMERATION_BUDGET) -> Iterator[ChuMorphism]:
    """Every valid morphism, forward maps in lex order, then backward maps in lex order.

    The budget bounds the number of forward maps scanned and the number of
    morphisms produced.
    """
    if restrict not in RESTRICTIONS:
        raise ContractViolation(f"unknown restriction {restrict!r}")
    check_same_alphabet(source, target)
    inj = restrict in ("monic-C", "monic-E")
    surj = restrict == "monic-C"
    fwds, bwds = _morphism_table(source, target, inj, surj, budget)
    for f, g in zip(fwds, bwds):
        yield ChuMorphism(source, target, f, g)


def count_morphisms(source: ChuSpace, target: ChuSpace, restrict: str = "all",
                    budget: int = ENUMERATION_BUDGET) -> int:
    inj = restrict in ("monic-C", "monic-E")
    return len(_morphism_table(source, target, inj, restrict == "monic-C", budget)[0])


def backward_candidates(source: ChuSpace, target: ChuSpace, forward: Sequence[int]) -> list[list[int]]:
    """For each target attribute y, the source attributes x with s(f(-), y) == r(-, x)."""
    pulled = target.matrix[np.asarray(forward, dtype=np.int64)] if len(forward) else \
        np.zeros((0, len(target.attributes)), dtype=np.int8)
    out = []
    for y in range(len(target.attributes)):
        col = pulled[:, y]
        out.append([x for x in range(len(source.attributes))
                    if np.array_equal(source.matrix[:, x], col)])
    return out


def complete_forward(source: ChuSpace, target: ChuSpace, forward) -> ChuMorphism | None:
    """The backward map that turns ``forward`` into a morphism, if one exists.

    ``forward`` is a label mapping or an index tuple.  When the source is
    extensional the completion is unique; otherwise the least candidate per
    attribute is taken (see :func:`completion_is_unique`).
    """
    check_same_alphabet(source, target)
    if isinstance(forward, Mapping):
        forward = tuple(target.object_index(forward[a]) for a in source.objects)
    cands = backward_candidates(source, target, forward)
    if any(not c for c in cands):
        return None
    return ChuMorphism(source, target, tuple(forward), tuple(c[0] for c in cands))


def completion_is_unique(source: ChuSpace, target: ChuSpace, forward) -> bool:
    if isinstance(forward, Mapping):
        forward = tuple(target.object_index(forward[a]) for a in source.objects)
    return all(len(c) == 1 for c in backward_candidates(source, target, forward))


# ---------------------------------------------------------------------------
# monicity


@dataclass(frozen=True)
class RefutationWitness:
    """Two distinct morphisms ``test_space -> source`` equalised by the tested morphism."""

    test_space: ChuSpace
    pair: tuple[ChuMorphism, ChuMorphism]
    kind: str  # "forward-injectivity" or "backward-surjectivity"


@dataclass(frozen=True)
class MonicVerdict:
    category: str
    monic: bool
    forward_injective: bool
    backward_surjective: bool
    failed: str | None = None
    witness: RefutationWitness | None = None
    outside_assumption: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "monic": self.monic,
            "forward_injective": self.forward_injective,
            "backward_surjective": self.backward_surjective,
            "failed": self.failed,
            "has_witness": self.witness is not None,
            "outside_assumption": self.outside_assumption,
        }


def in_category(space: ChuSpace, category: str) -> bool:
    if category == "C":
        return True
    if category == "E":
        return is_extensional(space)
    if category == "B":
        return is_biextensional(space)
    if category == "Separable":
        return is_separable(space)
    raise ContractViolation(f"unknown category {category!r}; expected one of {CATEGORIES}")


def _fresh(label: str, taken: set[str]) -> str:
    while label in taken:
        label += "'"
    taken.add(label)
    return label


def injectivity_witness(m: ChuMorphism) -> RefutationWitness | None:
    """Two one-point probes hitting objects that the forward map identifies.

    The probe space has one object and one attribute per alphabet symbol, with
    r(a, sigma) = sigma; it is biextensional, so it lives in every category here.
    """
    first: dict[int, int] = {}
    clash = None
    for i, b in enumerate(m.forward):
        if b in first:
            clash = (first[b], i)
            break
        first[b] = i
    if clash is None:
        return None
    src = m.source
    k = len(src.alphabet)
    probe = ChuSpace(src.alphabet, ("a",), src.alphabet.symbols, np.arange(k, dtype=np.int8).reshape(1, k))
    pair = tuple(
        ChuMorphism(probe, src, (ai,), tuple(int(v) for v in src.matrix[ai]))
        for ai in clash
    )
    return RefutationWitness(probe, pair, "forward-injectivity")


def surjectivity_witness(m: ChuMorphism) -> RefutationWitness | None:
    """Duplicate the attributes missed by the backward map and swap the copies.

    Test space: same objects; attributes are the image of the backward map plus
    two labelled copies (``x.copy1``, ``x.copy2``) of every missed attribute.
    The two morphisms are the identity on objects and differ only on missed
    attributes.
    """
    src = m.source
    image = set(m.backward)
    missed = [x for x in range(len(src.attributes)) if x not in image]
    if not missed:
        return None
    kept = [x for x in range(len(src.attributes)) if x in image]
    taken = {src.attributes[x] for x in kept}
    labels = [src.attributes[x] for x in kept]
    copies = []
    for suffix in (".copy1", ".copy2"):
        copies.append([_fresh(src.attributes[x] + suffix, taken) for x in missed])
    columns = kept + missed + missed
    test = ChuSpace(src.alphabet, src.objects, tuple(labels + copies[0] + copies[1]),
                    src.matrix[:, columns] if columns else np.zeros((len(src.objects), 0)))
    pos_kept = {x: i for i, x in enumerate(kept)}
    pair = []
    for copy in (0, 1):
        offset = len(kept) + copy * len(missed)
        pos_missed = {x: offset + i for i, x in enumerate(missed)}
        g = tuple(pos_kept[x] if x in pos_kept else pos_missed[x] for x in range(len(src.attributes)))
        pair.append(ChuMorphism(test, src, tuple(range(len(src.objects))), g))
    return RefutationWitness(test, (pair[0], pair[1]), "backward-surjectivity")


def witness_is_valid(witness: RefutationWitness, m: ChuMorphism) -> bool:
    """Definitional check: both members are morphisms, distinct, and equalised by ``m``."""
    p1, p2 = witness.pair
    if p1.source != witness.test_space or p2.source != witness.test_space:
        return False
    if p1.target != m.source or p2.target != m.source:
        return False
    if not (validate(p1) and validate(p2)):
        return False
    return p1 != p2 and compose(m, p1) == compose(m, p2)


def is_monic(m: ChuMorphism, category: str = "C", with_witness: bool = True) -> MonicVerdict:
    """Decide monicity by the injectivity/surjectivity characterisation.

    C: forward injective and backward surjective.  E and B: forward injective.
    Separable: backward surjective.  Non-monic verdicts carry a refutation
    witness unless ``with_witness`` is false.
    """
    if category not in CATEGORIES:
        raise ContractViolation(f"unknown category {category!r}; expected one of {CATEGORIES}")
    for role, space in (("source", m.source), ("target", m.target)):
        if not in_category(space, category):
            raise CategoryMembershipViolated(f"{role} is not an object of category {category}")
    inj, surj = m.forward_injective, m.backward_surjective
    if category == "C":
        monic = inj and surj
    elif category in ("E", "B"):
        monic = inj
    else:
        monic = surj
    failed = None
    witness = None
    if not monic:
        if category in ("C", "E", "B") and not inj:
            failed = "forward-injectivity"
            if with_witness:
                witness = injectivity_witness(m)
        else:
            failed = "backward-surjectivity"
            if with_witness:
                witness = surjectivity_witness(m)
    small = len(m.source.alphabet) < 2
    notes = ("alphabet has fewer than two symbols; characterisation assumed two or more",) if small else ()
    return MonicVerdict(category, monic, inj, surj, failed, witness, small, notes)


@dataclass(frozen=True)
class ImplicationCheck:
    """Instance check of: target extensional and forward surjective => backward injective."""

    applies: bool
    holds: bool

    def __bool__(self):
        return self.holds


def check_surjective_forward_implies_injective_backward(m: ChuMorphism) -> ImplicationCheck:
    applies = is_extensional(m.target) and m.forward_surjective
    return ImplicationCheck(applies, (not applies) or m.backward_injective)


def definitional_refutation(m: ChuMorphism, test_spaces, category: str = "C"):
    """Bounded left-cancellation search.

    Looks for two distinct morphisms ``T -> m.source`` from one of the given
    test spaces (those outside ``category`` are skipped) whose composites with
    ``m`` agree.  Returns ``(T, p1, p2)`` or ``None``.
    """
    src = m.source
    for t in test_spaces:
        if not in_category(t, category):
            continue
        fwds, bwds = _morphism_table(t, src, False, False, ENUMERATION_BUDGET)
        seen: dict[tuple, int] = {}
        for k, (f, g) in enumerate(zip(fwds, bwds)):
            key = (tuple(m.forward[i] for i in f), tuple(g[j] for j in m.backward))
            if key in seen:
                j = seen[key]
                return (t, ChuMorphism(t, src, fwds[j], bwds[j]), ChuMorphism(t, src, f, g))
            seen[key] = k
    return None
