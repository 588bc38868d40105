"""Long-horizon numerical soak, excluded from the default run.

Run explicitly with: pytest -m soak tests/test_soak.py
"""

import numpy as np
import pytest

from beamplan.bridge import LiveSession
from beamplan.scenario import load_scenario
from beamplan.workspace import inequality_value


@pytest.mark.soak
def test_million_step_soak_no_drift():
    # a converged world kept stepping for 1e6 steps: no NaN creep, hands
    # stay in their workspaces, loss stays converged
    sc = load_scenario("arrow4")
    session = LiveSession(sc, seed=0)
    for _ in range(2000):
        session.tick()
        if session.snapshot()["sim_status"] == "converged":
            break
    assert session.snapshot()["sim_status"] == "converged"
    for k in range(1_000_000):
        session.tick()
        if k % 100_000 == 0:
            world = session.world
            for i, h in enumerate(world.hands):
                assert np.all(np.isfinite(h.position))
                assert np.all(np.isfinite(h.angles))
                assert inequality_value(h, session.cfg.workspaces[i]) <= 0.0
            for c in world.components:
                assert np.all(np.isfinite(c.position))
    assert session.snapshot()["loss"]["normalized_total"] < 0.05
