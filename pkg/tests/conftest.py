import ibis
import pytest

from arpersist.innovations import DiscreteInteger, LogTail, ShiftedPareto, Weibull

CANONICAL_PROBS = (0.5, 0.2, 0.1, 0.1, 0.1)


@pytest.hookimpl()
def pytest_sessionstart(session):
    ibis.connect("duckdb://")
    ibis.options.interactive = False


@pytest.hookimpl()
def pytest_sessionfinish(session):
    ibis.get_backend().disconnect()


@pytest.fixture
def canonical_discrete():
    # x0 = 0.5: v1 = 0.5, v2 = 0.4, v3 = 0.345
    yield DiscreteInteger(CANONICAL_PROBS)


@pytest.fixture
def canonical_file(tmp_path):
    path = tmp_path.joinpath("canonical.txt")
    path.write_text("\n".join(str(p) for p in CANONICAL_PROBS) + "\n")
    yield path


@pytest.fixture
def log_tail_half():
    yield LogTail(0.5)


@pytest.fixture
def log_tail_transient():
    yield LogTail(1.5)


@pytest.fixture
def pareto():
    yield ShiftedPareto(2.0, 1.0)


@pytest.fixture
def weibull():
    yield Weibull(0.5, 1.0)
