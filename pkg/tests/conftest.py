import pytest

from pinchclust import WeightedGraph

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    """Print and remember one pass/fail line for the acceptance summary."""
    line = f"[{'PASS' if passed else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    print(line)
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_graph(n, edges, prefix="v"):
    return WeightedGraph([f"{prefix}{i}" for i in range(n)], edges)


@pytest.fixture
def triangle():
    return make_graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


@pytest.fixture
def path3():
    return make_graph(3, [(0, 1, 1), (1, 2, 1)])


def barbell(k: int, bridge: float = 1.0) -> WeightedGraph:
    """Two unit-weight ``k``-cliques joined by one edge ``(k-1, k)``."""
    edges = [(i, j, 1) for i in range(k) for j in range(i + 1, k)]
    edges += [(i, j, 1) for i in range(k, 2 * k) for j in range(i + 1, 2 * k)]
    edges.append((k - 1, k, bridge))
    return make_graph(2 * k, edges)


@pytest.fixture
def barbell3():
    return barbell(3)


@pytest.fixture
def barbell4():
    return barbell(4)
