"""Transfer workloads: synthetic generation and CSV round-trip.

A trace fixes (source, destination, amount) per transfer; how many partial
payments to split into and how much redundancy to spend are routing-time
parameters, so the same trace is comparable across schemes and budgets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable

from ..errors import UsageError
from .config import SimConfig

TRACE_HEADER = ("source", "destination", "amount")


@dataclass(frozen=True)
class Transfer:
    source: int
    destination: int
    amount: float
    num_base_tx: int | None = None       # falls back to the run config
    num_redundant_tx: int | None = None

    def validated(self, num_nodes: int) -> "Transfer":
        if not 0 <= self.source < num_nodes:
            raise UsageError(f"source {self.source} out of range")
        if not 0 <= self.destination < num_nodes:
            raise UsageError(f"destination {self.destination} out of range")
        if self.source == self.destination:
            raise UsageError("source and destination must differ")
        if self.amount <= 0:
            raise UsageError("amount must be positive")
        return self


def gen_transfers(cfg: SimConfig, rng) -> list[Transfer]:
    """Uniform endpoint pairs with log-normal amounts truncated to a range."""
    cfg.validate()
    mu = math.log(cfg.amount_median)
    lo, hi = cfg.amount_range
    out = []
    for _ in range(cfg.num_transfers):
        source = rng.randrange(cfg.num_nodes)
        destination = rng.randrange(cfg.num_nodes)
        while destination == source:
            destination = rng.randrange(cfg.num_nodes)
        amount = rng.lognormvariate(mu, cfg.amount_sigma)
        while not lo <= amount <= hi:
            amount = rng.lognormvariate(mu, cfg.amount_sigma)
        out.append(
            Transfer(source=source, destination=destination, amount=round(amount, 6))
        )
    return out


def write_transfers_csv(transfers: Iterable[Transfer], path: str):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_HEADER)
        for t in transfers:
            writer.writerow([t.source, t.destination, repr(t.amount)])


def read_transfers_csv(path: str) -> list[Transfer]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
            raise UsageError(
                f"trace header must be {','.join(TRACE_HEADER)}, got {header}"
            )
        out = []
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise UsageError(f"bad trace row: {row}")
            out.append(
                Transfer(
                    source=int(row[0]),
                    destination=int(row[1]),
                    amount=float(row[2]),
                )
            )
        return out
