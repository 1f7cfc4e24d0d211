import pytest

from ruledsurf.scene import BUILTINS, load_scene

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def builtin_scenes():
    return {name: load_scene(name) for name in BUILTINS}


@pytest.fixture
def acceptance(request):
    """Record one criterion verdict; the lines are printed at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(label, passed, detail):
        lines.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(lines, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
