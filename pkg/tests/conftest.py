"""Shared pytest plumbing: the acceptance-criterion report block."""
import pytest

_CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_report():
    """Collect one [PASS]/[FAIL] line per acceptance criterion."""

    def _report(name: str, ok: bool, detail: str) -> bool:
        _CRITERION_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
