import numpy as np
import pytest

from hydra_embed.graphio import load_karate, shortest_path_matrix

ACCEPTANCE_RESULTS = []


def record_criterion(name, passed, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20190611)


@pytest.fixture(scope="session")
def karate():
    return load_karate()


@pytest.fixture(scope="session")
def karate_distances(karate):
    return shortest_path_matrix(karate)
