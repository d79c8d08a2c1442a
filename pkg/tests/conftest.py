import numpy as np
import pytest

from sac2vec.graph import build_layer


@pytest.fixture
def triangle():
    return build_layer([(0, 1), (1, 2), (2, 0)], 3)


def empirical(draw, n_draws, size):
    counts = np.zeros(size)
    for _ in range(n_draws):
        counts[draw()] += 1
    return counts / n_draws


ACCEPTANCE_LINES = {}


def record_criterion(number, title, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:>2} [{status}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def skip_criterion(number, title, reason):
    line = f"criterion {number:>2} [SKIP] {title}: {reason}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    pytest.skip(reason)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
