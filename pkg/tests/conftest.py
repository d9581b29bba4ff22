import pytest

from scholarrank.dataset import FacultyRecord, Rank, load_table7_fixture
from scholarrank.pipeline import fixture_inputs


@pytest.fixture(scope="session")
def table7():
    return load_table7_fixture()


@pytest.fixture(scope="session")
def fixture_data():
    _, measures, usn = fixture_inputs()
    return measures, usn


def fac(t10, rank=Rank.FULL, uid="U", profile=True, name="x"):
    return FacultyRecord(uid, name, rank, t10, profile)


_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the session summary prints them all."""

    def record(name, passed, detail):
        _CRITERIA.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
