"""Simulation parameters for a single experiment run."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from ..errors import ConfigError

SCHEME_NAMES = ("retry", "redundancy", "redundant-retry-10")


@dataclass
class SimConfig:
    num_nodes: int = 100            # nodes in the small-world graph
    ring_neighbors: int = 8         # lattice degree k before rewiring (even)
    rewire_prob: float = 0.8        # per-edge rewiring probability
    balance_range: tuple = (100.0, 1000.0)   # log-uniform per channel direction
    num_transfers: int = 50000
    num_base_tx: int = 25           # v: partial payments that must all land
    num_redundant_tx: int = 0       # u: extra attempts the scheme may spend
    scheme: str = "retry"
    hop_delay_range: tuple = (0.05, 0.15)    # seconds per channel operation
    num_paths: int = 25             # cap on precomputed disjoint paths per pair
    seed: int = 0
    amount_median: float = 20.0     # synthetic trace: log-normal median
    amount_sigma: float = 1.0       # synthetic trace: sigma of log amount
    amount_range: tuple = (1.0, 1000.0)      # synthetic trace truncation
    retry_cap: int = 10             # upfront redundancy cap for redundant-retry

    def validate(self) -> "SimConfig":
        if self.num_nodes < 2:
            raise ConfigError("num_nodes: must be at least 2")
        if self.ring_neighbors < 2 or self.ring_neighbors % 2 != 0:
            raise ConfigError("ring_neighbors: must be even and at least 2")
        if self.ring_neighbors >= self.num_nodes:
            raise ConfigError("ring_neighbors: must be smaller than num_nodes")
        if not 0.0 <= self.rewire_prob <= 1.0:
            raise ConfigError("rewire_prob: must lie in [0, 1]")
        lo, hi = self.balance_range
        if not 0 < lo <= hi:
            raise ConfigError("balance_range: need 0 < low <= high")
        if self.num_transfers < 0:
            raise ConfigError("num_transfers: must be nonnegative")
        if self.num_base_tx < 1:
            raise ConfigError("num_base_tx: must be at least 1")
        if self.num_redundant_tx < 0:
            raise ConfigError("num_redundant_tx: must be nonnegative")
        if self.scheme not in SCHEME_NAMES:
            raise ConfigError(f"scheme: must be one of {list(SCHEME_NAMES)}")
        dlo, dhi = self.hop_delay_range
        if not 0 < dlo <= dhi:
            raise ConfigError("hop_delay_range: need 0 < low <= high")
        if self.num_paths < 1:
            raise ConfigError("num_paths: must be at least 1")
        alo, ahi = self.amount_range
        if not 0 < alo <= ahi:
            raise ConfigError("amount_range: need 0 < low <= high")
        if self.amount_median <= 0 or self.amount_sigma < 0:
            raise ConfigError("amount_median must be positive, amount_sigma nonnegative")
        if self.retry_cap < 0:
            raise ConfigError("retry_cap: must be nonnegative")
        return self

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = set(cls.field_names())
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        clean = dict(data)
        for key in ("balance_range", "hop_delay_range", "amount_range"):
            if key in clean:
                value = clean[key]
                if not (isinstance(value, (list, tuple)) and len(value) == 2):
                    raise ConfigError(f"{key}: must be a [low, high] pair")
                clean[key] = (float(value[0]), float(value[1]))
        return cls(**clean).validate()

    def to_dict(self) -> dict:
        out = {}
        for name in self.field_names():
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out
