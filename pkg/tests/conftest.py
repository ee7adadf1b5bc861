import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

from seqpath.fixtures import FIXTURE_NAMES, fixture  # noqa: E402


def random_profile(game, rng, floor=0.0):
    parts = []
    for I in game.infosets:
        p = rng.dirichlet(np.ones(len(I.actions)))
        p = floor + (1 - floor * len(p)) * p
        parts.append(p)
    return np.concatenate(parts) if parts else np.zeros(0)


def random_beliefs(game, rng):
    mu = np.empty(game.n_beliefs)
    for I in game.infosets:
        mu[I.member_span] = rng.dirichlet(np.ones(len(I.members)))
    return mu


@pytest.fixture(params=FIXTURE_NAMES)
def fx(request):
    return fixture(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(k))
