"""Reversible escrow contracts and the four-stage transfer choreography.

A contract between an upstream party P1 and a downstream party P2 locks
``amount + fee`` from P1 exactly once and carries two challenges:

* forward: P2 may claim by revealing the payment preimage within the
  forward window, moving the contract to FORWARD_CLAIMED;
* reverse: P1 may answer a forward claim by revealing the receiver's
  polynomial constant term (proof of overdraw) within the longer reverse
  window, reclaiming ``amount`` and leaving P2 only the fee.

The reverse window strictly outlasts the forward window, so P1 always has
time to retaliate; per-hop windows along a path are staggered so that a
claim at the last hop can be relayed upstream hop by hop without any
window expiring first.

Terminal payouts, with L = amount + fee:
  nothing claimed (expired or cancelled)  -> P1 gets L, P2 gets 0
  forward claim stands                    -> P1 gets 0, P2 gets L
  forward claim reverted                  -> P1 gets amount, P2 keeps fee
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .challenge import Preimage, recover_secret
from .errors import UsageError, VerificationError, WindowClosedError
from .group import Group


def as_funds(value) -> Fraction:
    """Coerce to an exact rational; floats go through their decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise UsageError(f"cannot interpret {value!r} as funds")


class ContractState(Enum):
    DEPLOYED = "deployed"
    FORWARD_CLAIMED = "forward_claimed"
    REVERTED = "reverted"
    EXPIRED = "expired"
    RENOUNCED = "renounced"
    CANCELLED = "cancelled"


_TERMINAL = {
    ContractState.REVERTED,
    ContractState.EXPIRED,
    ContractState.RENOUNCED,
    ContractState.CANCELLED,
}


@dataclass(frozen=True)
class Payout:
    to_p1: Fraction
    to_p2: Fraction


@dataclass
class BoomerangContract:
    """One hop's escrow.  P1 is upstream (pays), P2 is downstream."""

    group: Group
    forward_challenge: object
    revert_challenge: object
    amount: Fraction
    fee: Fraction
    t0: float
    delta_fwd: float
    delta_rev: float
    state: ContractState = ContractState.DEPLOYED

    @property
    def locked(self) -> Fraction:
        """Liquidity still held by the escrow; zero once terminal."""
        if self.state in _TERMINAL:
            return Fraction(0)
        return self.amount + self.fee

    def claim_forward(self, candidate: Preimage, now: float) -> ContractState:
        """P2 claims with the payment preimage; window ends are inclusive."""
        if self.state is not ContractState.DEPLOYED:
            raise UsageError(f"cannot claim forward from {self.state.value}")
        if not self.t0 <= now <= self.t0 + self.delta_fwd:
            raise WindowClosedError(
                f"forward window is [{self.t0}, {self.t0 + self.delta_fwd}], got {now}"
            )
        if self.group.oneway(candidate.value) != self.forward_challenge:
            raise VerificationError("preimage does not open the forward challenge")
        self.state = ContractState.FORWARD_CLAIMED
        return self.state

    def claim_reverse(self, secret: int, now: float) -> ContractState:
        """P1 answers a forward claim with the recovered overdraw secret."""
        if self.state is not ContractState.FORWARD_CLAIMED:
            raise UsageError(f"cannot claim reverse from {self.state.value}")
        if not self.t0 <= now <= self.t0 + self.delta_rev:
            raise WindowClosedError(
                f"reverse window is [{self.t0}, {self.t0 + self.delta_rev}], got {now}"
            )
        if self.group.oneway(secret) != self.revert_challenge:
            raise VerificationError("secret does not open the revert challenge")
        self.state = ContractState.REVERTED
        return self.state

    def expire(self, now: float) -> ContractState:
        """P1 reclaims after the forward window passed with no claim."""
        if self.state is not ContractState.DEPLOYED:
            raise UsageError(f"cannot expire from {self.state.value}")
        if now <= self.t0 + self.delta_fwd:
            raise UsageError("forward window still open")
        self.state = ContractState.EXPIRED
        return self.state

    def cancel(self) -> ContractState:
        """Consensual teardown before any claim; only P2 may request it,
        which is why cancelling is risk-free for P1."""
        if self.state is not ContractState.DEPLOYED:
            raise UsageError(f"cannot cancel from {self.state.value}")
        self.state = ContractState.CANCELLED
        return self.state

    def renounce(self) -> ContractState:
        """P1 gives up the reverse claim, making a forward claim final now
        instead of waiting out the reverse window."""
        if self.state is not ContractState.FORWARD_CLAIMED:
            raise UsageError(f"cannot renounce from {self.state.value}")
        self.state = ContractState.RENOUNCED
        return self.state

    def settle(self, now: float | None = None) -> Payout:
        """Final payout split.  FORWARD_CLAIMED settles only once the reverse
        window has passed, which requires ``now``."""
        total = self.amount + self.fee
        if self.state in (ContractState.EXPIRED, ContractState.CANCELLED):
            return Payout(to_p1=total, to_p2=Fraction(0))
        if self.state is ContractState.RENOUNCED:
            return Payout(to_p1=Fraction(0), to_p2=total)
        if self.state is ContractState.REVERTED:
            return Payout(to_p1=self.amount, to_p2=self.fee)
        if self.state is ContractState.FORWARD_CLAIMED:
            if now is not None and now > self.t0 + self.delta_rev:
                return Payout(to_p1=Fraction(0), to_p2=total)
            raise UsageError("forward claim not final until the reverse window passes")
        raise UsageError(f"cannot settle from {self.state.value}")


def deploy(
    group: Group,
    forward_challenge,
    revert_challenge,
    amount,
    fee,
    t0: float,
    delta_fwd: float,
    delta_rev: float,
) -> BoomerangContract:
    amount = as_funds(amount)
    fee = as_funds(fee)
    if amount <= 0:
        raise UsageError("amount must be positive")
    if fee < 0:
        raise UsageError("fee must be nonnegative")
    if delta_fwd <= 0 or delta_rev <= 0:
        raise UsageError("window lengths must be positive")
    if not delta_fwd < delta_rev:
        raise UsageError("reverse window must strictly outlast the forward window")
    return BoomerangContract(
        group=group,
        forward_challenge=forward_challenge,
        revert_challenge=revert_challenge,
        amount=amount,
        fee=fee,
        t0=t0,
        delta_fwd=delta_fwd,
        delta_rev=delta_rev,
    )


@dataclass(frozen=True)
class HopTimeouts:
    """Per-hop (forward, reverse) window lengths for an n-hop path.

    Hop 0 is the sender's own channel.  Forward windows shrink toward the
    receiver and reverse windows grow, so any claim can be relayed one hop
    per step without running out of time, as long as each relay takes less
    than one step.
    """

    t0: float
    step: float
    windows: tuple[tuple[float, float], ...]

    @property
    def num_hops(self) -> int:
        return len(self.windows)

    def forward_deadline(self, hop: int) -> float:
        return self.t0 + self.windows[hop][0]

    def reverse_deadline(self, hop: int) -> float:
        return self.t0 + self.windows[hop][1]


def stagger_timeouts(num_hops: int, t0: float, step: float) -> HopTimeouts:
    """Window lengths for hop k of n: forward (n-k) steps, reverse (n+1+k) steps."""
    if num_hops < 1:
        raise UsageError("need at least one hop")
    if step <= 0:
        raise UsageError("step must be positive")
    windows = tuple(
        ((num_hops - k) * step, (num_hops + 1 + k) * step) for k in range(num_hops)
    )
    return HopTimeouts(t0=t0, step=step, windows=windows)


@dataclass
class ContractChain:
    """One payment path's escrows in upstream-to-downstream order.

    ``index`` ties the chain to its challenge index; ``reached_destination``
    is False when deployment stalled partway, leaving a shorter chain.
    """

    index: int
    contracts: list[BoomerangContract]
    reached_destination: bool = True


@dataclass(frozen=True)
class StageEvent:
    seq: int
    time: float
    stage: str
    chain_index: int
    hop: int
    transition: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "time": self.time,
            "stage": self.stage,
            "chain": self.chain_index,
            "hop": self.hop,
            "transition": self.transition,
            "detail": self.detail,
        }


def stage_trace_to_json(events: Sequence[StageEvent]) -> str:
    return json.dumps([e.to_dict() for e in events], indent=2)


def run_transfer_stages(
    chains: Sequence[ContractChain],
    max_claims: int,
    deliveries: Sequence[Preimage],
    now: float | None = None,
) -> list[StageEvent]:
    """Drive deployed chains through deliver, cancel, and finish.

    ``max_claims`` is the claim budget v (also the polynomial degree).  The
    honest flow claims at most v chains and renounces their reverse legs.
    More than v deliveries is an overdraw: the constant term is recovered
    from the revealed preimages and every delivered chain is reverted.
    """
    if max_claims < 1:
        raise UsageError("claim budget must be at least 1")
    by_index: dict[int, ContractChain] = {}
    for chain in chains:
        if chain.index in by_index:
            raise UsageError(f"duplicate chain index {chain.index}")
        if not chain.contracts:
            raise UsageError(f"chain {chain.index} has no contracts")
        by_index[chain.index] = chain

    seen: set[int] = set()
    for p in deliveries:
        if p.index in seen:
            raise UsageError(f"duplicate delivery for index {p.index}")
        seen.add(p.index)
        chain = by_index.get(p.index)
        if chain is None:
            raise UsageError(f"delivery for unknown chain {p.index}")
        if not chain.reached_destination:
            raise UsageError(f"chain {p.index} never reached the destination")

    events: list[StageEvent] = []
    seq = 0

    def emit(stage: str, chain_index: int, hop: int, transition: str, detail: str = ""):
        nonlocal seq
        events.append(
            StageEvent(
                seq=seq,
                time=t,
                stage=stage,
                chain_index=chain_index,
                hop=hop,
                transition=transition,
                detail=detail,
            )
        )
        seq += 1

    group = chains[0].contracts[0].group
    t = chains[0].contracts[0].t0 if now is None else now

    for chain in chains:
        for hop, c in enumerate(chain.contracts):
            if c.state is not ContractState.DEPLOYED:
                raise UsageError(
                    f"chain {chain.index} hop {hop} is {c.state.value}, expected deployed"
                )
            emit("promise", chain.index, hop, "deploy")

    # Deliver: the receiver claims hop by hop back toward the sender, so the
    # preimage each intermediary needs is already public when its turn comes.
    delivered: list[ContractChain] = []
    for p in deliveries:
        chain = by_index[p.index]
        delivered.append(chain)
        for hop in range(len(chain.contracts) - 1, -1, -1):
            chain.contracts[hop].claim_forward(p, now=t)
            emit("deliver", chain.index, hop, "claim_forward")

    overdraw = len(deliveries) > max_claims
    if overdraw:
        secret = recover_secret(list(deliveries), degree=max_claims, modulus=group.order)
        emit("deliver", -1, -1, "recover_secret", detail=f"{secret:x}")
        # Retaliation travels sender to receiver: the sender opens its own
        # hop first and each downstream party reuses the revealed secret.
        for chain in delivered:
            for hop, c in enumerate(chain.contracts):
                c.claim_reverse(secret, now=t)
                emit("deliver", chain.index, hop, "claim_reverse")

    # Cancel: every undelivered chain, including partial ones, is dismantled
    # on the receiver's request from the far end back toward the sender.
    delivered_ids = {c.index for c in delivered}
    for chain in chains:
        if chain.index in delivered_ids:
            continue
        for hop in range(len(chain.contracts) - 1, -1, -1):
            chain.contracts[hop].cancel()
            emit("cancel", chain.index, hop, "cancel")

    if not overdraw:
        for chain in delivered:
            for hop, c in enumerate(chain.contracts):
                c.renounce()
                emit("finish", chain.index, hop, "renounce")

    return events


def chain_states(chain: ContractChain) -> list[ContractState]:
    return [c.state for c in chain.contracts]


def total_locked(chains: Iterable[ContractChain]) -> Fraction:
    return sum((c.locked for chain in chains for c in chain.contracts), Fraction(0))
