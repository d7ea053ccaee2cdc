import numpy as np
import pytest

from swarm_seek import engine, scenario

_LINES = []


@pytest.fixture
def report(capsys):
    """Print a line straight to the terminal and keep it for the summary."""

    def emit(line):
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)


_RUNS = {}


def preset_trace(name, **overrides):
    """Cached simulation of a bundled preset (traces are deterministic)."""
    key = (name, tuple(sorted((k, repr(v)) for k, v in overrides.items())))
    if key not in _RUNS:
        _RUNS[key] = engine.run(scenario.preset(name, **overrides))
    return _RUNS[key]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
