import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def record_criterion(request, capsys):
    """Print one verdict line now and again in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number, title, passed, detail, seconds):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail} ({seconds:.1f} s)"
        lines.append((number, line))
        with capsys.disabled():
            print("\n" + line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
