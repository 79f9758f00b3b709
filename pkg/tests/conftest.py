import numpy as np
import pytest

from invsource.frequency import FrequencyGrid
from invsource.geometry import Disk, Peanut
from invsource.source import SourceModel, constant_amplitude, quadratic_amplitude
from invsource.synthesis import FarField, synthesize_dataset

BAND_KMAX = 8 * np.pi / 3


@pytest.fixture(scope="session")
def base_grid():
    return FrequencyGrid.doubled(BAND_KMAX, 16)


@pytest.fixture(scope="session")
def peanut_model():
    return SourceModel(Peanut(), quadratic_amplitude(), 0.0, 1.0)


@pytest.fixture(scope="session")
def disk_model():
    return SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)


@pytest.fixture(scope="session")
def peanut_pair(peanut_model, base_grid):
    return [synthesize_dataset(peanut_model, FarField(d), base_grid) for d in ((1.0, 0.0), (-1.0, 0.0))]


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Record one ``PASS/FAIL criterion N`` line; printed in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def log(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        lines.append((number, line))
        print(line)
        return passed

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines, key=lambda item: item[0]):
            terminalreporter.write_line(line)
