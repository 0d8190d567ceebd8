"""Deterministic discrete-event simulation of redundant multi-path transfers.

One global event queue ordered by (time, insertion sequence) drives every
channel operation.  Channel operations (lock, release, move) each take a
uniform random delay; control messages between a sender and its in-flight
attempts are instantaneous.  All randomness flows through a single injected
rng, so a given (config, trace, seed) replays bit-identically.

A transfer splits into v partial payments and is routed by one of three
schemes, all sharing one loop: launch some attempts up front, then react to
reserve responses until either v paths hold reservations (execute them all)
or success is impossible (roll everything back).

  retry               launch v, replace failures up to u times
  redundancy          launch v+u, never replace
  redundant-retry-10  launch v+min(u,10), replace with the remaining budget

Contracts on each hop are tracked symbolically (by attempt and hop index);
the cryptographic modules are exercised against this engine in integration
tests rather than on the hot path.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from ..errors import UsageError
from .config import SimConfig
from .metrics import MetricsRow
from .topology import Topology, gen_topology, precompute_paths, to_units
from .traces import Transfer

RESERVING = "reserving"
RESERVED = "reserved"
FAILED = "failed"
ABORTED = "aborted"
ROLLED_BACK = "rolled_back"
EXECUTED = "executed"


@dataclass(frozen=True)
class SchemePlan:
    """How many attempts to launch immediately and how many failures to replace."""

    name: str
    upfront: int
    retries: int


def route_retry(num_base: int, num_redundant: int) -> SchemePlan:
    return SchemePlan("retry", num_base, num_redundant)


def route_redundancy(num_base: int, num_redundant: int) -> SchemePlan:
    return SchemePlan("redundancy", num_base + num_redundant, 0)


def route_redundant_retry(num_base: int, num_redundant: int, cap: int = 10) -> SchemePlan:
    upfront_extra = min(num_redundant, cap)
    return SchemePlan(
        f"redundant-retry-{cap}", num_base + upfront_extra, num_redundant - upfront_extra
    )


def scheme_plan(name: str, num_base: int, num_redundant: int, cap: int = 10) -> SchemePlan:
    if name == "retry":
        return route_retry(num_base, num_redundant)
    if name == "redundancy":
        return route_redundancy(num_base, num_redundant)
    if name == f"redundant-retry-{cap}":
        return route_redundant_retry(num_base, num_redundant, cap)
    raise UsageError(f"unknown scheme {name!r}")


class Attempt:
    """One partial payment trying to reserve liquidity along one path."""

    __slots__ = ("path", "units", "hops_locked", "state", "owner")

    def __init__(self, path, units, owner=None):
        self.path = path
        self.units = units
        self.hops_locked = 0
        self.state = RESERVING
        self.owner = owner


@dataclass
class TfOutcome:
    index: int
    source: int
    destination: int
    amount: float
    success: bool
    start: float
    end: float
    executed_tx: int
    attempts_used: int


class TransferRun:
    """Reserve/finalize state machine for a single transfer."""

    __slots__ = (
        "engine",
        "index",
        "transfer",
        "v",
        "retries_left",
        "upfront",
        "paths",
        "units",
        "reserved",
        "attempts",
        "outstanding",
        "inflight",
        "finalized",
        "success",
        "executed_txs",
        "start_time",
    )

    def __init__(self, engine, index, transfer, plan: SchemePlan, paths, units):
        self.engine = engine
        self.index = index
        self.transfer = transfer
        self.v = 0  # set by start()
        self.upfront = plan.upfront
        self.retries_left = plan.retries
        self.paths = paths
        self.units = units
        self.reserved = []
        self.attempts = []
        self.outstanding = 0
        self.inflight = 0
        self.finalized = False
        self.success = False
        self.executed_txs = 0
        self.start_time = 0.0

    def start(self, now, num_base):
        self.v = num_base
        self.start_time = now
        if not self.paths:
            # No route at all: the transfer fails before any attempt.
            self.finalized = True
            self.success = False
            self._complete(now)
            return
        for _ in range(self.upfront):
            self._spawn_attempt()

    def _spawn_attempt(self):
        engine = self.engine
        path = self.paths[engine.rng.randrange(len(self.paths))]
        attempt = Attempt(path, self.units, owner=self)
        self.attempts.append(attempt)
        self.outstanding += 1
        self.inflight += 1
        engine.log("attempt", tf=self.index, path=path)
        engine.schedule(engine.draw_delay(), engine.reserve_step, attempt, 0)

    def on_response(self, attempt, ok, now):
        # Instantaneous notification from the attempt; cannot arrive after
        # finalize because finalize aborts every attempt still reserving.
        self.outstanding -= 1
        if ok:
            self.reserved.append(attempt)
        elif self.retries_left > 0:
            self.retries_left -= 1
            self._spawn_attempt()
        if (
            len(self.reserved) >= self.v
            or self.outstanding == 0
            or len(self.reserved) + self.outstanding + self.retries_left < self.v
        ):
            self._finalize(now)

    def _finalize(self, now):
        engine = self.engine
        self.finalized = True
        for attempt in self.attempts:
            if attempt.state is RESERVING:
                attempt.state = ABORTED
                self.outstanding -= 1
                if attempt.hops_locked:
                    engine.schedule(
                        engine.draw_delay(),
                        engine.rollback_step,
                        attempt,
                        attempt.hops_locked - 1,
                    )
                else:
                    self.inflight -= 1
        self.success = len(self.reserved) == self.v
        engine.log(
            "finalize", tf=self.index, decision="execute" if self.success else "rollback"
        )
        for attempt in self.reserved:
            self.inflight += 1
            if self.success:
                engine.schedule(
                    engine.draw_delay(), engine.execute_step, attempt, len(attempt.path) - 2
                )
            else:
                engine.schedule(
                    engine.draw_delay(), engine.rollback_step, attempt, attempt.hops_locked - 1
                )
        self._maybe_complete(now)

    def process_done(self, now):
        self.inflight -= 1
        self._maybe_complete(now)

    def on_executed(self, attempt, now):
        self.executed_txs += 1
        self.process_done(now)

    def _maybe_complete(self, now):
        if self.finalized and self.inflight == 0:
            self._complete(now)

    def _complete(self, now):
        t = self.transfer
        self.engine.record_outcome(
            TfOutcome(
                index=self.index,
                source=t.source,
                destination=t.destination,
                amount=t.amount,
                success=self.success,
                start=self.start_time,
                end=now,
                executed_tx=self.executed_txs,
                attempts_used=len(self.attempts),
            )
        )


class SimEngine:
    """Event loop plus the channel-operation primitives."""

    def __init__(self, topo: Topology, cfg: SimConfig, rng, trace_sink=None):
        self.topo = topo
        self.cfg = cfg
        self.rng = rng
        self.trace_sink = trace_sink
        self.now = 0.0
        self._seq = 0
        self._heap = []
        self._paths_cache = {}
        self.outcomes = []
        self._backlogs = {}
        self._next_tf = {}
        self._tf_counter = 0

    # Event plumbing.

    def schedule(self, delay, fn, *args):
        self._seq += 1
        heapq.heappush(self._heap, (self.now + delay, self._seq, fn, args))

    def draw_delay(self) -> float:
        lo, hi = self.cfg.hop_delay_range
        return self.rng.uniform(lo, hi)

    def log(self, kind, **fields):
        if self.trace_sink is not None:
            fields["time"] = self.now
            fields["event"] = kind
            self.trace_sink(fields)

    def run_queue(self):
        heap = self._heap
        while heap:
            time, _, fn, args = heapq.heappop(heap)
            self.now = time
            fn(*args)

    # Channel-operation processes.  Each process owns one event at a time;
    # instantaneous aborts flip the attempt state and the stale event no-ops.

    def reserve(self, path, units) -> Attempt:
        """Standalone hop-by-hop reservation, outside any transfer."""
        if len(path) < 2:
            raise UsageError("path needs at least one hop")
        attempt = Attempt(tuple(path), units, owner=None)
        self.schedule(self.draw_delay(), self.reserve_step, attempt, 0)
        return attempt

    def reserve_step(self, attempt, hop):
        if attempt.state is not RESERVING:
            return  # aborted while this hop was in flight
        path = attempt.path
        a, b = path[hop], path[hop + 1]
        if self.topo.balance[(a, b)] >= attempt.units:
            self.topo.lock(a, b, attempt.units)
            attempt.hops_locked += 1
            self.log("lock", edge=(a, b), units=attempt.units)
            if hop == len(path) - 2:
                attempt.state = RESERVED
                owner = attempt.owner
                if owner is not None:
                    owner.process_done(self.now)
                    owner.on_response(attempt, True, self.now)
            else:
                self.schedule(self.draw_delay(), self.reserve_step, attempt, hop + 1)
        else:
            attempt.state = FAILED
            self.log("reserve_failed", edge=(a, b), units=attempt.units)
            owner = attempt.owner
            if attempt.hops_locked:
                self.schedule(
                    self.draw_delay(), self.rollback_step, attempt, attempt.hops_locked - 1
                )
            elif owner is not None:
                owner.process_done(self.now)
            if owner is not None:
                owner.on_response(attempt, False, self.now)

    def rollback_step(self, attempt, hop):
        path = attempt.path
        a, b = path[hop], path[hop + 1]
        self.topo.unlock(a, b, attempt.units)
        self.log("release", edge=(a, b), units=attempt.units)
        if hop > 0:
            self.schedule(self.draw_delay(), self.rollback_step, attempt, hop - 1)
        else:
            attempt.hops_locked = 0
            if attempt.state is not FAILED:
                attempt.state = ROLLED_BACK
            if attempt.owner is not None:
                attempt.owner.process_done(self.now)

    def execute_step(self, attempt, hop):
        path = attempt.path
        a, b = path[hop], path[hop + 1]
        self.topo.transfer_locked(a, b, attempt.units)
        self.log("execute", edge=(a, b), units=attempt.units)
        if hop > 0:
            self.schedule(self.draw_delay(), self.execute_step, attempt, hop - 1)
        else:
            attempt.state = EXECUTED
            attempt.hops_locked = 0
            owner = attempt.owner
            if owner is not None:
                owner.on_executed(attempt, self.now)

    def finalize_amp(self, outstanding, successful, num_base) -> str:
        """Abort in-flight attempts, then execute or roll back the reserved set.

        Standalone counterpart of a transfer's finalize, for attempts made
        through ``reserve``.  Execution is all-or-nothing on |successful|.
        """
        for attempt in outstanding:
            if attempt.state is RESERVING:
                attempt.state = ABORTED
                if attempt.hops_locked:
                    self.schedule(
                        self.draw_delay(), self.rollback_step, attempt, attempt.hops_locked - 1
                    )
        decision = "execute" if len(successful) == num_base else "rollback"
        for attempt in successful:
            if attempt.state is not RESERVED:
                raise UsageError("finalize_amp given a non-reserved attempt")
            if decision == "execute":
                self.schedule(
                    self.draw_delay(), self.execute_step, attempt, len(attempt.path) - 2
                )
            else:
                self.schedule(
                    self.draw_delay(), self.rollback_step, attempt, attempt.hops_locked - 1
                )
        return decision

    # Transfer orchestration.

    def paths_for(self, source, dest):
        key = (source, dest)
        cached = self._paths_cache.get(key)
        if cached is None:
            cached = precompute_paths(self.topo, source, dest, self.cfg.num_paths)
            self._paths_cache[key] = cached
        return cached

    def route_transfer(self, transfer: Transfer, plan: SchemePlan) -> TfOutcome:
        """Run one transfer to completion on an otherwise idle engine."""
        if self._heap:
            raise UsageError("engine queue is not idle")
        before = len(self.outcomes)
        self._launch(transfer, plan)
        self.run_queue()
        return self.outcomes[before]

    def _launch(self, transfer: Transfer, plan: SchemePlan):
        transfer.validated(self.topo.num_nodes)
        num_base = (
            transfer.num_base_tx
            if transfer.num_base_tx is not None
            else self.cfg.num_base_tx
        )
        units = max(1, to_units(transfer.amount) // num_base)
        paths = self.paths_for(transfer.source, transfer.destination)
        run = TransferRun(self, self._tf_counter, transfer, plan, paths, units)
        self._tf_counter += 1
        self.log("tf_start", tf=run.index, source=transfer.source)
        run.start(self.now, num_base)

    def record_outcome(self, outcome: TfOutcome):
        self.log("tf_done", tf=outcome.index, success=outcome.success)
        self.outcomes.append(outcome)
        node = outcome.source
        if self._backlogs.get(node):
            self.schedule(0.0, self._start_next, node)

    def _start_next(self, node):
        backlog = self._backlogs[node]
        position = self._next_tf[node]
        if position >= len(backlog):
            return
        self._next_tf[node] = position + 1
        transfer = backlog[position]
        plan = self._plan_for(transfer)
        self._launch(transfer, plan)

    def _plan_for(self, transfer: Transfer) -> SchemePlan:
        cfg = self.cfg
        num_base = (
            transfer.num_base_tx if transfer.num_base_tx is not None else cfg.num_base_tx
        )
        num_redundant = (
            transfer.num_redundant_tx
            if transfer.num_redundant_tx is not None
            else cfg.num_redundant_tx
        )
        return scheme_plan(cfg.scheme, num_base, num_redundant, cfg.retry_cap)

    def run(self, transfers) -> "RunResult":
        """Route every transfer, each source working through its backlog in order."""
        initial_funds = self.topo.total_funds()
        self._backlogs = {}
        for t in transfers:
            self._backlogs.setdefault(t.source, []).append(t)
        self._next_tf = {node: 0 for node in self._backlogs}
        # Bug guard: backlog iteration order must not depend on dict history.
        for node in sorted(self._backlogs):
            self.schedule(0.0, self._start_next, node)
        self.run_queue()
        final_funds = self.topo.total_funds()
        residual_locked = self.topo.total_locked()
        if len(self.outcomes) != len(transfers):
            raise UsageError("engine finished with unrouted transfers")
        return RunResult(
            outcomes=self.outcomes,
            num_nodes=self.topo.num_nodes,
            initial_funds=initial_funds,
            final_funds=final_funds,
            residual_locked=residual_locked,
        )


@dataclass
class RunResult:
    outcomes: list
    num_nodes: int
    initial_funds: int
    final_funds: int
    residual_locked: int

    @property
    def runtime(self) -> float:
        return max((o.end for o in self.outcomes), default=0.0)

    def success_outcomes(self):
        return [o for o in self.outcomes if o.success]

    def throughput(self) -> float:
        successes = self.success_outcomes()
        runtime = self.runtime
        if not successes or runtime <= 0:
            return 0.0
        return sum(o.amount for o in successes) / (runtime * self.num_nodes)

    def ttc(self) -> float:
        successes = self.success_outcomes()
        if not successes:
            return 0.0
        return sum(o.end - o.start for o in successes) / len(successes)

    def volume(self) -> float:
        successes = self.success_outcomes()
        if not successes:
            return 0.0
        return sum(o.amount for o in successes) / len(successes)

    def invariant_report(self, num_base: int) -> dict:
        executed = [o.executed_tx for o in self.outcomes]
        return {
            "funds_conserved": self.initial_funds == self.final_funds,
            "residual_locked": self.residual_locked,
            "atomic": all(
                (o.executed_tx == num_base) if o.success else (o.executed_tx == 0)
                for o in self.outcomes
            ),
            "no_overdraw": all(e <= num_base for e in executed),
        }

    def metrics_row(self, scheme: str, u: int) -> MetricsRow:
        return MetricsRow(
            scheme=scheme,
            u=u,
            throughput_mean=self.throughput(),
            throughput_std=0.0,
            ttc_mean=self.ttc(),
            ttc_std=0.0,
            volume_mean=self.volume(),
            volume_std=0.0,
        )


def run_experiment_result(cfg: SimConfig, transfers, rng, trace_sink=None) -> RunResult:
    """Build a fresh topology from ``rng`` and route the trace; full detail."""
    cfg.validate()
    topo = gen_topology(cfg, rng)
    engine = SimEngine(topo, cfg, rng, trace_sink=trace_sink)
    result = engine.run(transfers)
    if result.initial_funds != result.final_funds or result.residual_locked != 0:
        raise UsageError("engine invariant violated: funds not conserved")
    return result


def run_experiment(cfg: SimConfig, transfers, rng, trace_sink=None) -> MetricsRow:
    result = run_experiment_result(cfg, transfers, rng, trace_sink=trace_sink)
    return result.metrics_row(cfg.scheme, cfg.num_redundant_tx)
