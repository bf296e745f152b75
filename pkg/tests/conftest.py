import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mucrit.geometry import PointCloud  # noqa: E402


@pytest.fixture
def two_points():
    return PointCloud([(-1.0, 0.0), (1.0, 0.0)])


def circle_cloud(n, radius=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return PointCloud(radius * np.c_[np.cos(t), np.sin(t)])


@pytest.fixture
def circle200():
    return circle_cloud(200)


@pytest.fixture
def circle400():
    return circle_cloud(400)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
