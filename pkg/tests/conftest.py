import pytest

# (criterion id, passed, detail) rows filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_acceptance():
    def _record(ac_id: str, passed: bool, detail: str):
        ACCEPTANCE_RESULTS.append((ac_id, bool(passed), detail))
        print(f"{ac_id} {'PASS' if passed else 'FAIL'}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac_id, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0][2:])):
        terminalreporter.write_line(f"{ac_id:<5} {'PASS' if passed else 'FAIL'}  {detail}")
