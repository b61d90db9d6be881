import numpy as np
import pytest

from ucfem import build_structured_mesh

_ACCEPTANCE = []


def record_criterion(label: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mesh20():
    return build_structured_mesh(20)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
