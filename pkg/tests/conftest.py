import pytest

CRITERIA = {}


@pytest.fixture
def report():
    """Record and print the PASS/FAIL line of one acceptance criterion."""
    def emit(n, ok, detail):
        line = f'criterion {n}: {"PASS" if ok else "FAIL"} {detail}'
        CRITERIA[n] = line
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section('acceptance criteria')
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
