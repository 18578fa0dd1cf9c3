import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from chuspace import BINARY, ChuSpace

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def spaces(draw, max_objects=3, max_attributes=3, alphabet=BINARY):
    n = draw(st.integers(0, max_objects))
    m = draw(st.integers(0, max_attributes))
    cells = draw(st.lists(st.integers(0, len(alphabet) - 1), min_size=n * m, max_size=n * m))
    mat = np.array(cells, dtype=np.int8).reshape(n, m)
    return ChuSpace(alphabet, tuple(f"a{k}" for k in range(1, n + 1)),
                    tuple(f"x{k}" for k in range(1, m + 1)), mat)


@pytest.fixture
def two_column_map():
    """({a}, (0 1), {x1, x2}) -> ({b}, (0), {y}) with a->b, y->x1."""
    from chuspace import ChuMorphism

    c = ChuSpace.from_rows([[0, 1]], ["a"], ["x1", "x2"])
    c2 = ChuSpace.from_rows([[0]], ["b"], ["y"])
    return c, c2, ChuMorphism.from_labels(c, c2, {"a": "b"}, {"y": "x1"})


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:>2}. {line}")
