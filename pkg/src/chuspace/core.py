"""Finite Chu spaces over a finite alphabet.

A :class:`ChuSpace` is a matrix ``r: A x X -> Sigma`` whose rows are labelled
by objects and whose columns are labelled by attributes.  Entries are stored as
alphabet indices in an immutable ``int8`` array; labels only matter for I/O.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import AlphabetMismatch, BudgetExceeded, ContractViolation

ENUMERATION_BUDGET = 2 ** 24
DISCRETE_BUDGET = 2 ** 20


def _check_label(label: str, kind: str) -> None:
    if not label or any(ch.isspace() for ch in label):
        raise ContractViolation(f"{kind} label must be non-empty without whitespace: {label!r}")
    if "->" in label:
        raise ContractViolation(f"{kind} label may not contain '->': {label!r}")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ContractViolation("alphabet needs at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ContractViolation(f"alphabet symbols must be distinct: {symbols}")
        for s in symbols:
            _check_label(s, "symbol")

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol) -> int:
        try:
            return self.symbols.index(str(symbol))
        except ValueError:
            raise ContractViolation(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """``"0,1"`` -> ``Alphabet(("0", "1"))``."""
        return cls(tuple(s.strip() for s in text.split(",") if s.strip()))


BINARY = Alphabet(("0", "1"))


def default_objects(n: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(1, n + 1))


def default_attributes(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


@dataclass(frozen=True, eq=False)
class ChuSpace:
    """The triple ``(A, r, X)``; ``matrix[i, j]`` is the alphabet index of r(a_i, x_j)."""

    alphabet: Alphabet
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        objects = tuple(str(o) for o in self.objects)
        attributes = tuple(str(x) for x in self.attributes)
        for o in objects:
            _check_label(o, "object")
        for x in attributes:
            _check_label(x, "attribute")
        if len(set(objects)) != len(objects):
            raise ContractViolation("object labels must be pairwise distinct")
        if len(set(attributes)) != len(attributes):
            raise ContractViolation("attribute labels must be pairwise distinct")
        mat = np.array(self.matrix, dtype=np.int64, copy=True)
        if mat.size == 0:
            mat = mat.reshape(len(objects), len(attributes))
        if mat.shape != (len(objects), len(attributes)):
            raise ContractViolation(
                f"matrix shape {mat.shape} does not match {len(objects)}x{len(attributes)}")
        if mat.size and (mat.min() < 0 or mat.max() >= len(self.alphabet)):
            raise ContractViolation("matrix entry outside the alphabet")
        mat = mat.astype(np.int8)
        mat.setflags(write=False)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "matrix", mat)

    # construction helpers

    @classmethod
    def from_rows(cls, rows, objects=None, attributes=None, alphabet: Alphabet = BINARY) -> "ChuSpace":
        """Build from nested rows.  Integers are alphabet indices, strings are symbols."""
        rows = [list(r) for r in rows]
        n = len(rows) if objects is None else len(objects)
        if attributes is None:
            m = len(rows[0]) if rows else 0
            attributes = default_attributes(m)
        if objects is None:
            objects = default_objects(n)
        m = len(attributes)
        mat = np.zeros((len(objects), m), dtype=np.int64)
        if len(rows) != len(objects):
            raise ContractViolation("number of rows does not match number of objects")
        for i, row in enumerate(rows):
            if len(row) != m:
                raise ContractViolation(f"row {i} has {len(row)} entries, expected {m}")
            for j, v in enumerate(row):
                mat[i, j] = v if isinstance(v, (int, np.integer)) else alphabet.index(v)
        return cls(alphabet, tuple(objects), tuple(attributes), mat)

    @classmethod
    def from_function(cls, objects, attributes, fn, alphabet: Alphabet = BINARY) -> "ChuSpace":
        """``fn(a, x)`` returns an alphabet index or symbol for each label pair."""
        rows = [[fn(a, x) for x in attributes] for a in objects]
        return cls.from_rows(rows, [str(a) for a in objects], [str(x) for x in attributes], alphabet)

    # equality

    def _key(self):
        return (self.alphabet, self.objects, self.attributes, self.matrix.tobytes())

    def __eq__(self, other):
        if not isinstance(other, ChuSpace):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"ChuSpace({len(self.objects)}x{len(self.attributes)}, "
                f"objects={list(self.objects)}, attributes={list(self.attributes)}, "
                f"rows={self.matrix.tolist()})")

    # views

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @cached_property
    def _obj_index(self) -> dict[str, int]:
        return {o: i for i, o in enumerate(self.objects)}

    @cached_property
    def _attr_index(self) -> dict[str, int]:
        return {x: j for j, x in enumerate(self.attributes)}

    def object_index(self, label: str) -> int:
        try:
            return self._obj_index[label]
        except KeyError:
            raise ContractViolation(f"unknown object {label!r}") from None

    def attribute_index(self, label: str) -> int:
        try:
            return self._attr_index[label]
        except KeyError:
            raise ContractViolation(f"unknown attribute {label!r}") from None

    def entry(self, obj: str, attr: str) -> str:
        return self.alphabet.symbols[self.matrix[self.object_index(obj), self.attribute_index(attr)]]

    def row(self, obj: str) -> tuple[str, ...]:
        """r(a, -) as a symbol vector of length |X|."""
        syms = self.alphabet.symbols
        return tuple(syms[v] for v in self.matrix[self.object_index(obj)])

    def column(self, attr: str) -> tuple[str, ...]:
        """r(-, x) as a symbol vector of length |A|."""
        syms = self.alphabet.symbols
        return tuple(syms[v] for v in self.matrix[:, self.attribute_index(attr)])

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in r) for r in self.matrix]

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in c) for c in self.matrix.T]

    def relabel(self, objects=None, attributes=None) -> "ChuSpace":
        return ChuSpace(self.alphabet,
                        self.objects if objects is None else tuple(objects),
                        self.attributes if attributes is None else tuple(attributes),
                        self.matrix)

    def restrict(self, object_indices: Sequence[int]) -> "ChuSpace":
        """Subspace on the given objects with duplicate columns merged (first label kept)."""
        sub = self.matrix[list(object_indices)]
        seen: dict[bytes, int] = {}
        keep = []
        for j in range(sub.shape[1]):
            key = sub[:, j].tobytes()
            if key not in seen:
                seen[key] = j
                keep.append(j)
        return ChuSpace(self.alphabet,
                        tuple(self.objects[i] for i in object_indices),
                        tuple(self.attributes[j] for j in keep),
                        sub[:, keep])


def check_same_alphabet(*spaces: ChuSpace) -> None:
    first = spaces[0].alphabet
    for s in spaces[1:]:
        if s.alphabet != first:
            raise AlphabetMismatch(f"alphabets differ: {first.symbols} vs {s.alphabet.symbols}")


# ---------------------------------------------------------------------------
# structural predicates


def is_extensional(space: ChuSpace) -> bool:
    """No repeated columns.  With no objects every column is the empty vector."""
    cols = space.matrix.T
    return len({c.tobytes() for c in cols}) == cols.shape[0]


def is_separable(space: ChuSpace) -> bool:
    """No repeated rows."""
    rows = space.matrix
    return len({r.tobytes() for r in rows}) == rows.shape[0]


def is_biextensional(space: ChuSpace) -> bool:
    return is_extensional(space) and is_separable(space)


def missing_column(space: ChuSpace, budget: int = DISCRETE_BUDGET) -> tuple[str, ...] | None:
    """Lexicographically least function A -> Sigma not realised as a column.

    Returns the function as a symbol vector indexed like ``space.objects``, or
    ``None`` when the space is discrete.
    """
    k, n = len(space.alphabet), len(space.objects)
    if k ** n > budget:
        raise BudgetExceeded(f"|Sigma|^|A| = {k}^{n} exceeds discreteness budget {budget}")
    present = {tuple(int(v) for v in c) for c in space.matrix.T}
    for fn in itertools.product(range(k), repeat=n):
        if fn not in present:
            return tuple(space.alphabet.symbols[v] for v in fn)
    return None


def is_discrete(space: ChuSpace, budget: int = DISCRETE_BUDGET) -> bool:
    """Every function A -> Sigma appears as a column."""
    return missing_column(space, budget) is None


# ---------------------------------------------------------------------------
# colour refinement, canonical forms and isomorphism


def _refine(mats: Sequence[np.ndarray], nsym: int):
    """Joint colour refinement of rows and columns over several matrices.

    Colours are ranks of structural signatures computed over the union, so two
    matrices get comparable colours.
    """
    def rank(sigs_per_mat):
        pool = sorted({s for sigs in sigs_per_mat for s in sigs})
        idx = {s: i for i, s in enumerate(pool)}
        return [[idx[s] for s in sigs] for sigs in sigs_per_mat], len(pool)

    row_sigs = [[tuple(np.bincount(r, minlength=nsym).tolist()) for r in m.astype(np.int64)] for m in mats]
    col_sigs = [[tuple(np.bincount(c, minlength=nsym).tolist()) for c in m.T.astype(np.int64)] for m in mats]
    rows, nr = rank(row_sigs)
    cols, nc = rank(col_sigs)
    while True:
        new_row_sigs = []
        new_col_sigs = []
        for m, rc, cc in zip(mats, rows, cols):
            new_row_sigs.append([
                (rc[i], tuple(sorted(Counter((cc[j], int(m[i, j])) for j in range(m.shape[1])).items())))
                for i in range(m.shape[0])])
            new_col_sigs.append([
                (cc[j], tuple(sorted(Counter((rc[i], int(m[i, j])) for i in range(m.shape[0])).items())))
                for j in range(m.shape[1])])
        rows2, nr2 = rank(new_row_sigs)
        cols2, nc2 = rank(new_col_sigs)
        if nr2 == nr and nc2 == nc:
            return rows2, cols2
        rows, cols, nr, nc = rows2, cols2, nr2, nc2


def _row_orders(colors: list[int]) -> Iterator[list[int]]:
    classes: dict[int, list[int]] = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    blocks = [classes[c] for c in sorted(classes)]
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [i for p in perms for i in p]


def canonical_matrix(space: ChuSpace) -> np.ndarray:
    """Row-major lex-least matrix over colour-respecting row orders, columns sorted."""
    mat = space.matrix
    n, m = mat.shape
    if n == 0 or m == 0:
        return mat.copy()
    (colors,), _ = _refine([mat], len(space.alphabet))
    best = None
    for order in _row_orders(colors):
        sub = mat[order]
        cols = sorted(tuple(int(v) for v in c) for c in sub.T)
        key = tuple(itertools.chain.from_iterable(zip(*cols)))
        if best is None or key < best:
            best = key
    return np.array(best, dtype=np.int8).reshape(n, m)


def canonical_form(space: ChuSpace) -> ChuSpace:
    """Canonical representative of the isomorphism class, with labels a1.., x1.."""
    n, m = space.shape
    return ChuSpace(space.alphabet, default_objects(n), default_attributes(m), canonical_matrix(space))


def find_isomorphism(s1: ChuSpace, s2: ChuSpace):
    """First isomorphism s1 -> s2 in colour-respecting search order, or ``None``."""
    from .morph import ChuMorphism

    check_same_alphabet(s1, s2)
    if s1.shape != s2.shape:
        return None
    n, m = s1.shape
    a, b = s1.matrix, s2.matrix
    rows, cols = _refine([a, b], len(s1.alphabet))
    if sorted(rows[0]) != sorted(rows[1]) or sorted(cols[0]) != sorted(cols[1]):
        return None
    r1, r2 = rows

    def col_keys(mat, idx):
        sub = np.ascontiguousarray(mat[idx].T)
        return Counter(row.tobytes() for row in sub)

    assignment: list[int] = []
    used = [False] * n

    def search(i):
        if i == n:
            return True
        for j in range(n):
            if used[j] or r2[j] != r1[i]:
                continue
            assignment.append(j)
            used[j] = True
            if col_keys(a, list(range(i + 1))) == col_keys(b, assignment) and search(i + 1):
                return True
            assignment.pop()
            used[j] = False
        return False

    if not search(0):
        return None
    forward = tuple(assignment)
    # match target columns to source columns with equal vectors, in index order
    src_cols: dict[bytes, list[int]] = {}
    for x in range(m):
        src_cols.setdefault(np.ascontiguousarray(a[:, x]).tobytes(), []).append(x)
    permuted_b = b[list(forward)] if n else b
    backward = []
    for y in range(m):
        key = np.ascontiguousarray(permuted_b[:, y]).tobytes()
        backward.append(src_cols[key].pop(0))
    return ChuMorphism(s1, s2, forward, tuple(backward))


def is_isomorphic(s1: ChuSpace, s2: ChuSpace) -> bool:
    return find_isomorphism(s1, s2) is not None


# ---------------------------------------------------------------------------
# exhaustive enumeration

FILTERS = ("all", "extensional", "biextensional", "strongly-finite")


def _raw_count(nsym: int, n: int, m: int, column_sets: bool) -> int:
    if column_sets:
        return math.comb(nsym ** n, m)
    return nsym ** (n * m)


@lru_cache(maxsize=256)
def _enumerate_cell(alphabet: Alphabet, n: int, m: int, column_sets: bool, budget: int) -> tuple[ChuSpace, ...]:
    nsym = len(alphabet)
    raw = _raw_count(nsym, n, m, column_sets)
    if raw > budget:
        raise BudgetExceeded(f"{raw} raw matrices for a {n}x{m} cell exceed budget {budget}")
    seen: dict[bytes, ChuSpace] = {}
    if column_sets:
        vectors = list(itertools.product(range(nsym), repeat=n))
        source = (np.array(cols, dtype=np.int8).reshape(m, n).T for cols in itertools.combinations(vectors, m))
    else:
        source = (np.array(cells, dtype=np.int8).reshape(n, m)
                  for cells in itertools.product(range(nsym), repeat=n * m))
    objs, attrs = default_objects(n), default_attributes(m)
    for mat in source:
        canon = canonical_matrix(ChuSpace(alphabet, objs, attrs, mat))
        key = canon.tobytes()
        if key not in seen:
            seen[key] = ChuSpace(alphabet, objs, attrs, canon)
    return tuple(seen[k] for k in sorted(seen))


def enumerate_spaces(alphabet: Alphabet = BINARY, max_objects: int = 2, max_attributes: int = 2,
                     filter: str = "all", budget: int = ENUMERATION_BUDGET,
                     min_objects: int = 0, min_attributes: int = 0) -> Iterator[ChuSpace]:
    """Yield one canonical representative per isomorphism class.

    Cells are visited by object count, then attribute count; inside a cell the
    canonical matrices come in byte order.  Extensional filters enumerate sets of
    distinct columns instead of raw matrices.
    """
    if filter not in FILTERS:
        raise ContractViolation(f"unknown filter {filter!r}; expected one of {FILTERS}")
    column_sets = filter != "all"
    for n in range(min_objects, max_objects + 1):
        for m in range(min_attributes, max_attributes + 1):
            if filter == "strongly-finite" and m == 0:
                continue
            for space in _enumerate_cell(alphabet, n, m, column_sets, budget):
                if filter == "biextensional" and not is_separable(space):
                    continue
                yield space


def is_strongly_finite(space: ChuSpace) -> bool:
    """Finite (always), extensional, and with at least one attribute."""
    return len(space.attributes) >= 1 and is_extensional(space)


def initial_space(alphabet: Alphabet = BINARY, attribute: str = "x") -> ChuSpace:
    """(empty, empty, {x}): weakly initial among spaces with attributes."""
    return ChuSpace(alphabet, (), (attribute,), np.zeros((0, 1), dtype=np.int8))
