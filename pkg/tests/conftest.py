import numpy as np
import pytest

from beamplan.poses import Pose
from beamplan.sim import WorldState


def make_world(hands, components, attach=None, step=0, seed=0):
    """Assemble a WorldState directly for planner/unit tests."""
    attach = tuple(attach) if attach is not None else (None,) * len(hands)
    return WorldState(
        step=step,
        hands=tuple(hands),
        components=tuple(components),
        attach=attach,
        grasps=(None,) * len(hands),
        rng_seed=seed,
        selections=(None,) * len(hands),
    )


def random_pose(rng, spread=0.4, z=0.0):
    x, y = rng.uniform(-spread, spread, 2)
    yaw = rng.uniform(-np.pi, np.pi)
    return Pose((x, y, z), (0, 0, yaw))


@pytest.fixture(scope="session")
def ramp8_scenario():
    from beamplan.scenario import load_scenario
    return load_scenario("ramp8")


@pytest.fixture(scope="session")
def ramp8_batch(ramp8_scenario):
    """The fixed-seed convergence study, run once and shared."""
    from beamplan.harness import run_batch
    return run_batch(ramp8_scenario, 50, 0)
