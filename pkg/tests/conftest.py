import pytest

_criterion_lines: list[str] = []


class CriterionReport:
    """Collects one pass/fail line per acceptance criterion for the summary."""

    def check(self, criterion: str, passed: bool, detail: str) -> None:
        line = f"{criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        _criterion_lines.append(line)
        assert passed, line


@pytest.fixture(scope="session")
def criteria() -> CriterionReport:
    return CriterionReport()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
