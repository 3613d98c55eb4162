import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from superq.graded import GradingSignature

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

SMALL_SIGS = [GradingSignature(n, m) for n, m in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1), (1, 2), (3, 0), (0, 3)]]
SIGS_2_3 = [s for s in SMALL_SIGS if s.dim >= 2]


def all_subsets(sig):
    return [s for k in range(sig.dim + 1) for s in itertools.combinations(sig.labels, k)]


def random_twists(sig, rng):
    from superq.graded import TwistConfig
    return TwistConfig(tuple(rng.uniform(0.3, 2 * np.pi - 0.3, sig.dim)))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
