"""Exhaustive agreement sweeps over small enumerations.

Each suite returns a :class:`SweepResult` with a check count and the list of
failures (kept short; ``failures`` counts all of them).
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainGenerator, validate_cocone
from .core import (BINARY, Alphabet, ChuSpace, enumerate_spaces, find_isomorphism, is_biextensional,
                   is_discrete, is_extensional, is_separable)
from .errors import ContractViolation
from .finobj import attribute_bound
from .formats import emit_space, parse_space, space_from_json, space_to_json
from .morph import (ChuMorphism, check_surjective_forward_implies_injective_backward, compose,
                    definitional_refutation, enumerate_morphisms, in_category, is_monic, validate,
                    witness_is_valid)
from .universal import amalgamate, catalog

SUITES = ("monic-agreement", "component-determination", "amalgamation", "discrete-iso", "attribute-bound",
          "roundtrip")
# older numeric names, still accepted on the command line
SUITE_ALIASES = {"prop2.3": "monic-agreement", "prop2.2": "component-determination", "remark4.7": "discrete-iso"}
MAX_REPORTED = 20


@dataclass
class SweepResult:
    suite: str
    checked: int = 0
    failures: int = 0
    details: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, msg: str) -> None:
        self.failures += 1
        if len(self.details) < MAX_REPORTED:
            self.details.append(msg)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "checked": self.checked, "failures": self.failures,
                "details": self.details, "elapsed_s": round(self.elapsed, 3), **self.extra}


def _spaces(alphabet: Alphabet, max_objects: int, max_attributes: int) -> list:
    return list(enumerate_spaces(alphabet, max_objects, max_attributes))


def _all_morphisms(spaces):
    for s, t in itertools.product(spaces, repeat=2):
        for m in enumerate_morphisms(s, t):
            yield s, t, m


def _describe(m) -> str:
    return f"{m.source.matrix.tolist()} -> {m.target.matrix.tolist()} fwd={m.forward} bwd={m.backward}"


def sweep_monic_agreement(alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2,
                          test_objects: int = 2, test_attributes: int = 3,
                          categories=("C", "E", "B")) -> SweepResult:
    """Characterisation vs. witness construction vs. bounded definitional search."""
    t0 = time.perf_counter()
    res = SweepResult("monic-agreement")
    spaces = _spaces(alphabet, max_objects, max_attributes)
    tests = _spaces(alphabet, test_objects, test_attributes)
    per_cat = {}
    for cat in categories:
        members = [s for s in spaces if in_category(s, cat)]
        cat_tests = [t for t in tests if in_category(t, cat)]
        n = non_monic = 0
        for _, _, m in _all_morphisms(members):
            n += 1
            res.checked += 1
            v = is_monic(m, cat)
            non_monic += not v.monic
            if (v.witness is not None) != (not v.monic):
                res.fail(f"[{cat}] witness presence disagrees with verdict: {_describe(m)}")
            if v.witness is not None:
                if not witness_is_valid(v.witness, m):
                    res.fail(f"[{cat}] witness does not validate: {_describe(m)}")
                if not in_category(v.witness.test_space, cat):
                    res.fail(f"[{cat}] witness test space outside the category: {_describe(m)}")
            found = definitional_refutation(m, cat_tests, cat) is not None
            if found != (not v.monic):
                res.fail(f"[{cat}] definitional search {'found' if found else 'missed'} a refutation: {_describe(m)}")
        per_cat[cat] = {"morphisms": n, "non_monic": non_monic}
    res.extra = {"per_category": per_cat, "spaces": len(spaces), "test_spaces": len(tests)}
    res.elapsed = time.perf_counter() - t0
    return res


def sweep_component_determination(alphabet: Alphabet = BINARY, max_objects: int = 2,
                                  max_attributes: int = 2) -> SweepResult:
    """Forward/backward determination, the surjective-forward implication and closure of monics."""
    t0 = time.perf_counter()
    res = SweepResult("component-determination")
    spaces = _spaces(alphabet, max_objects, max_attributes)
    items = {"forward-determines": 0, "backward-determines": 0, "both-determine": 0, "surjective-forward": 0,
             "composition": 0}
    by_pair = {}
    for s, t in itertools.product(spaces, repeat=2):
        ms = list(enumerate_morphisms(s, t))
        by_pair[(s, t)] = ms
        ext_s, sep_t = is_extensional(s), is_separable(t)
        bi = is_biextensional(s) and is_biextensional(t)
        for m1, m2 in itertools.product(ms, repeat=2):
            same_f, same_g = m1.forward == m2.forward, m1.backward == m2.backward
            if ext_s:
                items["forward-determines"] += 1
                if same_f and not same_g:
                    res.fail(f"forward does not determine backward: {_describe(m1)} vs {m2.backward}")
            if sep_t:
                items["backward-determines"] += 1
                if same_g and not same_f:
                    res.fail(f"backward does not determine forward: {_describe(m1)} vs {m2.forward}")
            if bi:
                items["both-determine"] += 1
                if same_f != same_g:
                    res.fail(f"components not jointly determined: {_describe(m1)} vs {_describe(m2)}")
        for m in ms:
            chk = check_surjective_forward_implies_injective_backward(m)
            if not chk.applies:
                continue
            items["surjective-forward"] += 1
            if not chk.holds:
                res.fail(f"surjective forward without injective backward: {_describe(m)}")
    # monics compose, per category
    for cat in ("C", "E", "B"):
        members = [s for s in spaces if in_category(s, cat)]
        monics = {}
        for s, t in itertools.product(members, repeat=2):
            monics[(s, t)] = [m for m in by_pair[(s, t)] if is_monic(m, cat, with_witness=False).monic]
        for a, b, c in itertools.product(members, repeat=3):
            for m1 in monics[(a, b)]:
                for m2 in monics[(b, c)]:
                    items["composition"] += 1
                    if not is_monic(compose(m2, m1), cat, with_witness=False).monic:
                        res.fail(f"[{cat}] composite of monics not monic: {_describe(m1)} then {_describe(m2)}")
    res.checked = sum(items.values())
    res.extra = {"checks_per_item": items}
    res.elapsed = time.perf_counter() - t0
    return res


def amalgamation_triples(alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2):
    cat = catalog(alphabet, max_objects, max_attributes)
    for base in cat:
        legs = [m for t in cat for m in enumerate_morphisms(base, t, "monic-C")]
        for m1, m2 in itertools.product(legs, repeat=2):
            yield base, m1, m2


def sweep_amalgamation(alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2,
                       limit: int | None = None, seed: int = 0) -> SweepResult:
    """Every monic-iC cospan from the catalog completes to a commuting square of iC-monics.

    With ``limit`` set and more triples than that, a seeded sample of ``limit``
    triples is checked instead.
    """
    t0 = time.perf_counter()
    res = SweepResult("amalgamation")
    triples = list(amalgamation_triples(alphabet, max_objects, max_attributes))
    total = len(triples)
    if limit is not None and total > limit:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(total, size=limit, replace=False))
        triples = [triples[i] for i in pick]
    for base, m1, m2 in triples:
        res.checked += 1
        try:
            sq = amalgamate(base, m1, m2)
        except ContractViolation as exc:
            res.fail(f"amalgamate raised {type(exc).__name__}: {exc}")
            continue
        if not sq.commutes():
            res.fail("square does not commute")
        if not is_extensional(sq.apex) or not sq.apex.attributes:
            res.fail("apex is not strongly finite")
        for name, leg in (("from_left", sq.from_left), ("from_right", sq.from_right)):
            if not is_monic(leg, "C", with_witness=False).monic:
                res.fail(f"{name} is not monic in iC")
    res.extra = {"total_triples": total, "sampled": total != res.checked}
    res.elapsed = time.perf_counter() - t0
    return res


def discrete_variants(n: int, alphabet: Alphabet = BINARY, sample: int | None = None, seed: int = 0):
    """Discrete extensional spaces on ``n`` objects with permuted rows and columns."""
    from .gallery import discrete_space

    base = discrete_space(n, alphabet)
    m = len(base.attributes)
    row_perms = list(itertools.permutations(range(n)))
    if sample is None:
        col_perms = list(itertools.permutations(range(m)))
        combos = list(itertools.product(row_perms, col_perms))
    else:
        rng = np.random.default_rng(seed)
        combos = [(row_perms[int(rng.integers(len(row_perms)))], tuple(int(v) for v in rng.permutation(m)))
                  for _ in range(sample)]
    for rp, cp in combos:
        mat = base.matrix[list(rp)][:, list(cp)] if m else base.matrix[list(rp)]
        yield type(base)(alphabet, base.objects, tuple(base.attributes[c] for c in cp), mat)


def sweep_discrete_isomorphism(alphabet: Alphabet = BINARY, max_objects: int = 3, sample: int = 200,
                               seed: int = 0) -> SweepResult:
    """Discrete extensional spaces with the same object count are pairwise isomorphic."""
    t0 = time.perf_counter()
    res = SweepResult("discrete-iso")
    for n in range(0, max_objects + 1):
        pool = [s for s in enumerate_spaces(alphabet, n, len(alphabet) ** n, "extensional", min_objects=n,
                                            min_attributes=1)
                if is_discrete(s)]
        pool += list(discrete_variants(n, alphabet, None if n <= 2 else sample, seed))
        ref = pool[0]
        for s in pool:
            for t in (ref, pool[-1]):
                res.checked += 1
                if find_isomorphism(s, t) is None:
                    res.fail(f"no isomorphism between discrete spaces on {n} objects")
        res.extra[f"pool_{n}"] = len(pool)
    res.elapsed = time.perf_counter() - t0
    return res


def sweep_attribute_bound(alphabet: Alphabet = BINARY, max_objects: int = 3, max_attributes: int = 8) -> SweepResult:
    t0 = time.perf_counter()
    res = SweepResult("attribute-bound")
    for s in enumerate_spaces(alphabet, max_objects, max_attributes, "extensional"):
        res.checked += 1
        if attribute_bound(s) is not True:
            res.fail(f"bound fails on {s.matrix.tolist()}")
    res.elapsed = time.perf_counter() - t0
    return res


def sweep_roundtrip(alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2) -> SweepResult:
    """parse . emit is the identity, in text and JSON, on every enumerated space."""
    t0 = time.perf_counter()
    res = SweepResult("roundtrip")
    for s in enumerate_spaces(alphabet, max_objects, max_attributes):
        res.checked += 1
        text = emit_space(s)
        if parse_space(text) != s or emit_space(parse_space(text)) != text:
            res.fail(f"text round-trip fails on {s.matrix.tolist()}")
        data = json.loads(json.dumps(space_to_json(s)))
        if space_from_json(data) != s:
            res.fail(f"JSON round-trip fails on {s.matrix.tolist()}")
    res.elapsed = time.perf_counter() - t0
    return res


def run_suite(name: str, alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2,
              seed: int = 0, limit: int | None = None) -> SweepResult:
    name = SUITE_ALIASES.get(name, name)
    if name == "monic-agreement":
        return sweep_monic_agreement(alphabet, max_objects, max_attributes)
    if name == "component-determination":
        return sweep_component_determination(alphabet, max_objects, max_attributes)
    if name == "amalgamation":
        return sweep_amalgamation(alphabet, max_objects, max_attributes, limit, seed)
    if name == "discrete-iso":
        return sweep_discrete_isomorphism(alphabet, max_objects, seed=seed)
    if name == "attribute-bound":
        return sweep_attribute_bound(alphabet, max_objects, max_attributes)
    if name == "roundtrip":
        return sweep_roundtrip(alphabet, max_objects, max_attributes)
    raise ContractViolation(f"unknown suite {name!r}; expected one of {SUITES}")


# ---------------------------------------------------------------------------
# random explicit chains


def _random_extensional(rng, alphabet: Alphabet, n: int, m: int, separable: bool, tries: int = 200):
    nsym = len(alphabet)
    for _ in range(tries):
        cols = set()
        while len(cols) < m:
            cols.add(tuple(int(v) for v in rng.integers(nsym, size=n)))
        mat = np.array(sorted(cols), dtype=np.int8).reshape(m, n).T
        if separable and len({tuple(r) for r in mat.tolist()}) != n:
            continue
        return ChuSpace(alphabet, tuple(f"a{k}" for k in range(1, n + 1)),
                        tuple(f"x{k}" for k in range(1, m + 1)), mat)
    return None


def _random_extension(rng, src: ChuSpace, n_new: int, m_max: int, separable: bool, stage: int, tries: int = 200):
    """A random extensional target with a forward-injective morphism from ``src``.

    Each target column is a source column on the old objects plus random values
    on ``n_new`` new objects; the backward map is then forced.
    """
    nsym = len(src.alphabet)
    n, m = src.shape
    if m == 0:
        return None
    perm = [int(v) for v in rng.permutation(n + n_new)]
    fwd = perm[:n]
    new_rows = perm[n:]
    for _ in range(tries):
        m_t = int(rng.integers(1, m_max + 1))
        cols = {}
        while len(cols) < m_t and len(cols) < m * nsym ** n_new:
            x = int(rng.integers(m))
            col = [0] * (n + n_new)
            for a, r in enumerate(fwd):
                col[r] = int(src.matrix[a, x])
            for r in new_rows:
                col[r] = int(rng.integers(nsym))
            cols.setdefault(tuple(col), x)
        mat = np.array(list(cols), dtype=np.int8).reshape(len(cols), n + n_new).T
        if separable and len({tuple(r) for r in mat.tolist()}) != n + n_new:
            continue
        objs = tuple(f"s{stage}o{k}" for k in range(1, n + n_new + 1))
        attrs = tuple(f"s{stage}x{k}" for k in range(1, len(cols) + 1))
        tgt = ChuSpace(src.alphabet, objs, attrs, mat)
        return ChuMorphism(src, tgt, tuple(fwd), tuple(cols.values()))
    return None


def random_explicit_chain(rng, category: str = "iE", max_length: int = 4, max_objects: int = 3,
                          max_attributes: int = 4, alphabet: Alphabet = BINARY) -> ChainGenerator:
    """Seeded random chain of extensional stages (biextensional for ``iB``) joined by forward-injective maps."""
    separable = category == "iB"
    while True:
        length = int(rng.integers(1, max_length + 1))
        n0 = int(rng.integers(1, max_objects + 1))
        m0 = int(rng.integers(1, min(max_attributes, len(alphabet) ** n0) + 1))
        first = _random_extensional(rng, alphabet, n0, m0, separable)
        if first is None:
            continue
        spaces, links = [first], []
        for k in range(1, length):
            room = max_objects - len(spaces[-1].objects)
            n_new = int(rng.integers(0, room + 1))
            link = _random_extension(rng, spaces[-1], n_new, max_attributes, separable, k + 1)
            if link is None:
                break
            spaces.append(link.target)
            links.append(link)
        return ChainGenerator.explicit(spaces, links, category)


def cocones_into(chain: ChainGenerator, apex: ChuSpace, restrict: str = "all"):
    """All cocones over an explicit chain into ``apex``.

    A cocone is fixed by its last leg; earlier legs are composites with the links.
    """
    n = chain.max_length
    for last in enumerate_morphisms(chain.stage(n), apex, restrict):
        legs = [last]
        for i in range(n - 1, 0, -1):
            legs.append(compose(legs[-1], chain.link(i)))
        yield list(reversed(legs))


def check_colimit_universality(chain: ChainGenerator, apexes, restrict: str = "all") -> tuple[int, list[str]]:
    """Colimit is extensional, obeys the cocone law, and mediates uniquely into every cocone.

    Returns ``(cocones_checked, problems)``.
    """
    from .chain import colimit as _colimit, mediate as _mediate

    problems = []
    res = _colimit(chain)
    if not is_extensional(res.space):
        problems.append("colimit not extensional")
    if not validate_cocone(res.chain, res.space, res.injections):
        problems.append("injections violate the cocone law")
    n = res.depth
    checked = 0
    for apex in apexes:
        for legs in cocones_into(chain, apex, restrict):
            checked += 1
            med = _mediate(res, apex, legs)
            if med is None or not validate(med):
                problems.append(f"no mediating morphism into {apex.matrix.tolist()}")
                continue
            commuting = [m for m in enumerate_morphisms(res.space, apex)
                         if all(compose(m, res.injections[i]).forward == legs[i].forward
                                and compose(m, res.injections[i]).backward == legs[i].backward
                                for i in range(n))]
            if len(commuting) != 1 or commuting[0] != med:
                problems.append(f"{len(commuting)} commuting morphisms into {apex.matrix.tolist()}")
    return checked, problems
