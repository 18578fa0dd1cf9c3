"""Finiteness of objects in iC, iE and iB, decided by characterisation.

Categorical finiteness quantifies over every chain, so the classifiers here
use the structural characterisations; ``spot_check_factorization`` checks
the defining factorization property on concrete windowed fixtures.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (DISCRETE_BUDGET, ChuSpace, is_biextensional, is_extensional, is_separable,
                   missing_column)
from .errors import BudgetExceeded, CategoryMembershipViolated
from .morph import compose, enumerate_morphisms


def classify_iC(space: ChuSpace) -> bool:
    # concrete values always have finitely many objects
    return is_extensional(space)


def classify_iE(space: ChuSpace, budget: int = DISCRETE_BUDGET) -> bool:
    if not is_extensional(space):
        raise CategoryMembershipViolated("classify_iE needs an extensional space")
    return missing_column(space, budget) is None


def classify_iB(space: ChuSpace, budget: int = DISCRETE_BUDGET) -> bool:
    if not is_biextensional(space):
        raise CategoryMembershipViolated("classify_iB needs a biextensional space")
    n, m = space.shape
    if n == 1 and m == 0:
        return True
    return missing_column(space, budget) is None


def attribute_bound(space: ChuSpace) -> bool | None:
    """``|X| <= |Sigma|**|A|`` for extensional spaces; ``None`` when not applicable."""
    if not is_extensional(space):
        return None
    n, m = space.shape
    return m <= len(space.alphabet) ** n


@dataclass
class FinitenessReport:
    """Finiteness verdicts; ``None`` marks a category the space does not belong to."""

    objects: int
    attributes: int
    sigma: tuple[str, ...]
    extensional: bool
    separable: bool
    finite_iC: bool
    finite_iE: bool | None
    finite_iB: bool | None
    discrete: bool
    missing_function: tuple[str, ...] | None
    attribute_bound: bool | None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["sigma"] = list(self.sigma)
        d["missing_function"] = None if self.missing_function is None else list(self.missing_function)
        return d


def classify(space: ChuSpace, budget: int = DISCRETE_BUDGET) -> FinitenessReport:
    ext, sep = is_extensional(space), is_separable(space)
    try:
        v = missing_column(space, budget)
    except BudgetExceeded:
        raise
    discrete = v is None
    return FinitenessReport(
        objects=space.shape[0],
        attributes=space.shape[1],
        sigma=space.alphabet.symbols,
        extensional=ext,
        separable=sep,
        finite_iC=ext,
        finite_iE=(discrete if ext else None),
        finite_iB=(classify_iB(space, budget) if ext and sep else None),
        discrete=discrete,
        missing_function=v,
        attribute_bound=attribute_bound(space),
    )


# ---------------------------------------------------------------------------
# the defining property on fixtures


@dataclass
class FactorizationResult:
    stage: int | None
    morphism: object
    stages_tried: int

    @property
    def found(self) -> bool:
        return self.stage is not None


def find_factorization(chain, legs: Sequence, phi, stages: int, category: str | None = None) -> FactorizationResult:
    """Search stages 1..``stages`` for psi: F -> C_i with legs[i] . psi == phi.

    ``category`` picks the admissible psi: ``"iC"`` requires forward injective and
    backward surjective, ``"iE"``/``"iB"`` forward injective; default is the chain's own.
    """
    category = category or chain.category
    restrict = "monic-C" if category == "iC" else "monic-E"
    F = phi.source
    for i in range(1, stages + 1):
        stage = chain.stage(i)
        leg = legs[i - 1]
        for psi in enumerate_morphisms(F, stage, restrict):
            if compose(leg, psi) == phi:
                return FactorizationResult(i, psi, i)
    return FactorizationResult(None, None, stages)


def spot_check_factorization(fixture, classifier_says_finite: bool) -> bool:
    """True when the fixture's factorization search agrees with the classifier."""
    res = find_factorization(fixture.chain, fixture.legs, fixture.phi, fixture.stages_checked)
    return res.found == classifier_says_finite
