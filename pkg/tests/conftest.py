import math

import numpy as np
import pytest

from qhjbreather.kinematics import SpacetimePoint


def random_events(count, r_min, r_max, seed):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        r = rng.uniform(r_min, r_max)
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        x, y, z = (r * v).tolist()
        pts.append(SpacetimePoint(float(rng.uniform(0, 2 * math.pi)), x, y, z))
    return pts


@pytest.fixture
def generic_event():
    return SpacetimePoint(0.3, 1.2, 0.4, -0.7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
