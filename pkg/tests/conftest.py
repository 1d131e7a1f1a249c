from __future__ import annotations

import math

import pytest

from som3d.geometry import Scene

PAPER_SPHERES = [((0, 0, 0), 700.0), ((0, 1000, 0), 600.0), ((1000, 1000, 0), 800.0)]
# each sphere keeps exactly one octant inside the box
PAPER_S = math.pi / 2 * (700**2 + 600**2 + 800**2)


@pytest.fixture(scope="session")
def paper_scene() -> Scene:
    return Scene.from_spheres((0, 0, 0), 1000.0, PAPER_SPHERES)


@pytest.fixture
def empty_scene() -> Scene:
    return Scene.from_spheres((0, 0, 0), 1000.0, [])


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the lines are repeated in the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
