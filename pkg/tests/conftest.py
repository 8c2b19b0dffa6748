import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request, capsys):
    """Record and echo one ``PASS``/``FAIL`` line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def report(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title} | {detail}"
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
