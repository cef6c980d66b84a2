import math
from pathlib import Path

import numpy as np
import pytest

from sensing.io import load_scenario
from sensing.model import Environment, Point2, Wall

DATA = Path(__file__).resolve().parent.parent / "data"
DEFAULT_SEED = 20240607


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED,
                     help="seed for the randomized geometry tests")


def pytest_report_header(config):
    return f"random seed: {config.getoption('--seed')}"


def rectangle(x0, y0, x1, y1, losses=(6.0, 6.0, 6.0, 6.0), freq=300e9):
    """Closed rectangle; walls south, east, north, west."""
    corners = [Point2(x0, y0), Point2(x1, y0), Point2(x1, y1), Point2(x0, y1)]
    names = ["south", "east", "north", "west"]
    walls = [Wall(corners[k], corners[(k + 1) % 4], losses[k], names[k]) for k in range(4)]
    return Environment(walls=walls, carrier_freq_hz=freq)


def random_solvable_input(rng):
    """UE position, AoA and path length of a well-conditioned single bounce.

    Draws a UE and a reflection point and rejects grazing geometries where
    the reflection point barely leaves the BS-UE line.
    """
    while True:
        ue = Point2(*rng.uniform(-50.0, 50.0, size=2))
        o = Point2(*rng.uniform(-50.0, 50.0, size=2))
        if ue.norm() < 1.0 or o.norm() < 1.0 or o.distance_to(ue) < 1.0:
            continue
        to_bs = (-o).unit()
        to_ue = (ue - o).unit()
        cos_at_o = to_bs.dot(to_ue)
        cos_at_bs = o.unit().dot(ue.unit())
        if 1.0 + cos_at_o < 1e-2 or abs(cos_at_bs) < 0.05:
            continue
        v = o - ue
        aoa = math.atan2(-v.y, v.x) % (2.0 * math.pi)
        return ue, aoa, o.norm() + v.norm(), o


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def l_room():
    """L-shaped 20 x 10 m room with its 24 interior UEs."""
    env, observations, cfg = load_scenario(DATA / "l_room.json")
    return env, observations, cfg


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)
