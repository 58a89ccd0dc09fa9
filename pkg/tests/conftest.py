import os

import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=8, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test still asserts on ``ok``."""
    def record(label: str, ok: bool, detail: str) -> bool:
        request.config.stash[_ACCEPTANCE].append(f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_criterion_key):
            terminalreporter.write_line(line)


def _criterion_key(line: str):
    label = line.split("criterion ", 1)[1].split(":", 1)[0]
    num = "".join(ch for ch in label if ch.isdigit())
    return int(num or 0), label
