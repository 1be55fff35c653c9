import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rcqme.experiments import BathParams  # noqa: E402
from rcqme.spectral import OhmicSpectrum  # noqa: E402

GAMMA = 0.0071 / math.pi


@pytest.fixture
def ohmic():
    return OhmicSpectrum(GAMMA, 1000.0)


@pytest.fixture
def ref_baths():
    return BathParams(T_h=1.0, T_c=0.5, gamma=GAMMA, cutoff=1000.0).specs()


@pytest.fixture
def equal_baths():
    return BathParams(T_h=0.7, T_c=0.7, gamma=GAMMA, cutoff=1000.0).specs()


ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: numbered acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
