import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hierinfo.hpart import HierPartition  # noqa: E402


@st.composite
def nested_partitions(draw, min_n=1, max_n=9):
    """Random nested-list hierarchical partition of 1..n (no unary nodes)."""
    n = draw(st.integers(min_n, max_n))
    elements = draw(st.permutations(list(range(1, n + 1))))

    def build(block, depth):
        if len(block) == 1 or depth >= 4 or draw(st.booleans()):
            return sorted(block)
        cuts = draw(st.sets(st.integers(1, len(block) - 1), min_size=1))
        bounds = [0, *sorted(cuts), len(block)]
        return [build(block[a:b], depth + 1) for a, b in zip(bounds, bounds[1:])]

    return build(elements, 0)


@st.composite
def partition_pairs(draw, min_n=1, max_n=9):
    a = draw(nested_partitions(min_n, max_n))
    size = len(_flatten(a))
    b = draw(nested_partitions(size, size))
    return a, b


def _flatten(nested):
    if not nested or not isinstance(nested[0], list):
        return list(nested)
    return [e for c in nested for e in _flatten(c)]


def hp(nested) -> HierPartition:
    return HierPartition.from_nested(nested)


@pytest.fixture
def counter_example():
    from hierinfo.hpart import parse
    return (parse("[[[1,2],[3]],[4]]"), parse("[[2],[[3],[1,4]]]"), parse("[[1],[2],[[3],[4]]]"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
