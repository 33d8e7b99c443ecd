import math

import numpy as np
import pytest

from safefpr import KinematicState, ModelParams, Trajectory
from safefpr.types import L0_CANDIDATE, L0_FIXED


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def fixed_params():
    return ModelParams(l0_policy=L0_FIXED)


def static_actor_trajectory(distance: float, duration: float = 40.0) -> Trajectory:
    state = KinematicState(x=distance, y=0.0, v=0.0)
    return Trajectory(samples=((0.0, state), (duration, state)))


def random_case(rng: np.random.Generator):
    """One (ego, trajectory, l0) sample for conservatism/property corpora.

    Ego speeds up to 35 m/s with accelerations from hard braking to mild
    speed-up; the actor follows a piecewise-constant-acceleration course
    from a random start pose, sampled densely enough that interpolation is
    the contract rather than an approximation.
    """
    ego = KinematicState(
        0.0,
        0.0,
        rng.uniform(0.0, 35.0),
        rng.uniform(-6.0, 3.0),
        rng.uniform(-math.pi, math.pi),
    )
    r = rng.uniform(3.0, 150.0)
    b = rng.uniform(-math.pi, math.pi)
    x, y = r * math.cos(b), r * math.sin(b)
    heading = rng.uniform(-math.pi, math.pi)
    v = rng.uniform(0.0, 35.0)
    samples = [(0.0, KinematicState(x, y, v, 0.0, heading))]
    t = 0.0
    for _ in range(int(rng.integers(2, 6))):
        a = rng.uniform(-6.0, 3.0)
        for _ in range(max(1, int(rng.uniform(0.8, 2.5) / 0.4))):
            dt = 0.4
            if a < 0.0 and v + a * dt < 0.0:
                d = 0.5 * v * (v / -a)
                v2 = 0.0
            else:
                d = v * dt + 0.5 * a * dt * dt
                v2 = v + a * dt
            x += d * math.cos(heading)
            y += d * math.sin(heading)
            t += dt
            v = v2
            samples.append((t, KinematicState(x, y, v, a if v > 0.0 else 0.0, heading)))
    l0 = float(rng.uniform(1.0 / 30.0, 1.0))
    return ego, Trajectory(samples=tuple(samples)), l0


def corpus_params(i: int) -> ModelParams:
    return ModelParams(l0_policy=L0_CANDIDATE if i % 2 else L0_FIXED)
