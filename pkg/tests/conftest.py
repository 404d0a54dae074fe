import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def rel_err(value, reference, floor=0.0):
    """Relative deviation with an optional absolute floor on the denominator."""
    value, reference = np.asarray(value, dtype=float), np.asarray(reference, dtype=float)
    return np.max(np.abs(value - reference) / np.maximum(np.abs(reference), floor))


@pytest.fixture
def rel():
    return rel_err


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)


# shared helpers
SQRT2 = math.sqrt(2.0)
