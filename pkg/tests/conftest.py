import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def report_criterion(request):
    """Record one 'PASS/FAIL criterion N: ...' line; echoed live and in the summary."""
    lines = request.config.stash[_LINES_KEY]
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def record(number, result):
        line = f"{'PASS' if result.passed else 'FAIL'} criterion {number}: {result.name} ({result.seconds:.1f}s) {result.detail}"
        lines.append((number, line))
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
