import random

import pytest

from boomerang.simnet.config import SimConfig
from boomerang.simnet.topology import Topology, to_units


class ScriptedRng:
    """Random stand-in with queued answers, for hand-traced engine scenarios.

    ``randrange`` pops from ``picks`` (then returns 0); ``uniform`` pops from
    ``delays`` (then returns ``default_delay``).
    """

    def __init__(self, picks=(), delays=(), default_delay=0.1):
        self.picks = list(picks)
        self.delays = list(delays)
        self.default_delay = default_delay

    def randrange(self, n):
        value = self.picks.pop(0) if self.picks else 0
        if not 0 <= value < n:
            raise AssertionError(f"scripted pick {value} out of range({n})")
        return value

    def uniform(self, lo, hi):
        value = self.delays.pop(0) if self.delays else self.default_delay
        if not lo <= value <= hi:
            raise AssertionError(f"scripted delay {value} outside [{lo}, {hi}]")
        return value

    def random(self):
        return 0.0

    def lognormvariate(self, mu, sigma):
        raise AssertionError("scripted rng has no amount distribution")


def make_topology(num_nodes, edges):
    """Build a topology from {(u, v): (balance_uv, balance_vu)} in fund units."""
    topo = Topology(num_nodes=num_nodes)
    for (u, v), (buv, bvu) in edges.items():
        topo.add_edge(u, v, to_units(buv), to_units(bvu))
    return topo.finish()


def forced_delay_config(**kwargs) -> SimConfig:
    defaults = dict(
        num_nodes=4,
        ring_neighbors=2,
        rewire_prob=0.0,
        num_transfers=1,
        num_base_tx=1,
        num_redundant_tx=0,
        scheme="retry",
        hop_delay_range=(0.1, 0.1),
        num_paths=25,
        seed=0,
    )
    defaults.update(kwargs)
    return SimConfig(**defaults)


@pytest.fixture
def rng():
    return random.Random(1234)
