import pytest

from immersion import multigraph


@pytest.fixture(autouse=True)
def debug_checks(request, monkeypatch):
    """Small tests run with full bookkeeping checks after every mutation."""
    if request.node.get_closest_marker("nodebug") is None:
        monkeypatch.setattr(multigraph, "CHECK_INVARIANTS", True)
    yield


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
