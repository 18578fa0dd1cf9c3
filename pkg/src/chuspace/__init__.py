"""Chu spaces over finite alphabets: morphisms, monics, chain colimits,
finiteness of objects, amalgamation and a Fraisse-style builder."""
from ._accel import BACKEND
from .chain import (ChainGenerator, ColimitResult, check_extensionality_preserved, check_separability_preserved,
                    colimit, mediate, normalize_to_inclusions, separating_thread, validate_chain, validate_cocone)
from .core import (BINARY, Alphabet, ChuSpace, canonical_form, enumerate_spaces, find_isomorphism,
                   initial_space, is_biextensional, is_discrete, is_extensional, is_isomorphic, is_separable,
                   is_strongly_finite, missing_column)
from .errors import BudgetExceeded, ChuError, ContractViolation
from .finobj import FinitenessReport, attribute_bound, classify, classify_iB, classify_iC, classify_iE
from .gallery import (demo_no_colimit_in_iC, discrete_family, divisibility_chain, nondiscrete_witness_chain,
                      order_chain, subset_chain)
from .morph import (ChuMorphism, MonicVerdict, RefutationWitness, complete_forward, compose, count_morphisms,
                    enumerate_morphisms, is_monic, validate)
from .universal import AmalgamationSquare, FraisseState, amalgamate, bifinite_from_chain, fraisse_build

__version__ = "0.1.0"
