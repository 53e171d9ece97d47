import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion for the end-of-run summary."""
    def record(number, ok, detail):
        ACCEPTANCE.setdefault(number, []).append((ok, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[number]
        ok = all(r[0] for r in rows)
        detail = "; ".join(r[1] for r in rows)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
