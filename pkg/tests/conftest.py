import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def scenario():
    from secnav.scenario import builtin_scenario

    return builtin_scenario(0)


@pytest.fixture(scope="session")
def landmark_index(scenario):
    from secnav.localization import LandmarkIndex

    return LandmarkIndex(scenario.map.landmarks)


@pytest.fixture(scope="session")
def corridors(scenario):
    return {p.id: scenario.corridor(p) for p in scenario.paths}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
