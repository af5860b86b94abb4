import os
import tempfile

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("meshc", max_examples=60, deadline=None)
settings.load_profile("meshc")

# stage-depth cache is per test session unless the caller points elsewhere
os.environ.setdefault("MESHC_CACHE", os.path.join(tempfile.mkdtemp(prefix="meshc-"), "stage_depths.json"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
