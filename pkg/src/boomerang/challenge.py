"""Polynomial challenge scheme bounding how many payments a receiver may claim.

The receiver draws a uniform polynomial P of degree ``v`` over the scalar
field and publishes commitments H(coeff_j) to its coefficients.  The sender
derives the challenge for index i homomorphically:

    H(P(i)) = product_j H(coeff_j) ^ (i^j)

so each payment i can be gated on the preimage P(i) without the sender ever
learning it in advance.  Any v+1 revealed preimages determine the polynomial,
so overdrawing hands the sender the constant term P(0): a transferable proof
of cheating.  With at most v preimages revealed, P(0) remains equally likely
to be any field value, so honest receivers leak nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    InconsistentEvidenceError,
    InsufficientEvaluationsError,
    UsageError,
)
from .group import Group, get_group


@dataclass(frozen=True)
class SecretPolynomial:
    """Receiver-side polynomial; coefficients[j] multiplies x^j, all mod ``modulus``."""

    coefficients: tuple[int, ...]
    modulus: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def secret(self) -> int:
        """The constant term, recoverable by the sender only on overdraw."""
        return self.coefficients[0]

    def evaluate(self, x: int) -> int:
        acc = 0
        for coeff in reversed(self.coefficients):
            acc = (acc * x + coeff) % self.modulus
        return acc


@dataclass(frozen=True)
class Preimage:
    """A revealed evaluation P(index); unlocks the forward leg of payment ``index``."""

    index: int
    value: int

    def to_json(self) -> str:
        return json.dumps({"index": self.index, "value": _int_hex(self.value)})

    @classmethod
    def from_json(cls, text: str) -> "Preimage":
        data = json.loads(text)
        return cls(index=int(data["index"]), value=int(data["value"], 16))


def _int_hex(value: int) -> str:
    length = max(1, (value.bit_length() + 7) // 8)
    return value.to_bytes(length, "big").hex()


@dataclass(frozen=True)
class CommitmentSet:
    """Published images H(coeff_0) .. H(coeff_v) of the polynomial coefficients."""

    group: Group
    commitments: tuple

    @property
    def degree(self) -> int:
        return len(self.commitments) - 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "group": self.group.group_id,
                "commitments": [
                    self.group.element_to_hex(c) for c in self.commitments
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CommitmentSet":
        data = json.loads(text)
        group = get_group(data["group"])
        commitments = tuple(
            group.element_from_hex(c) for c in data["commitments"]
        )
        if not commitments:
            raise UsageError("commitment set must not be empty")
        return cls(group=group, commitments=commitments)


def setup(group: Group, degree: int, rng=None) -> tuple[SecretPolynomial, CommitmentSet]:
    """Draw a uniform polynomial of the given degree and commit to it.

    ``degree`` is the claim budget v: the receiver can safely reveal up to
    ``degree`` evaluations.  Must be at least 1, and small enough that at
    least degree+1 distinct nonzero indices exist in the field.
    """
    if degree < 1:
        raise UsageError("degree must be at least 1")
    if degree + 1 >= group.order:
        raise UsageError(f"degree {degree} too large for group order {group.order}")
    coefficients = tuple(group.random_scalar(rng) for _ in range(degree + 1))
    poly = SecretPolynomial(coefficients=coefficients, modulus=group.order)
    commitments = tuple(group.oneway(c) for c in coefficients)
    return poly, CommitmentSet(group=group, commitments=commitments)


def challenge_for_index(commitment_set: CommitmentSet, index: int):
    """H(P(index)), computed from the commitments alone."""
    group = commitment_set.group
    if not 1 <= index < group.order:
        raise UsageError(f"index must lie in [1, {group.order})")
    coefficients = [pow(index, j, group.order) for j in range(commitment_set.degree + 1)]
    return group.combine(commitment_set.commitments, coefficients)


@dataclass
class ChallengePlan:
    """Sender-side bookkeeping: which payment indices have been handed out."""

    commitment_set: CommitmentSet
    issued: set[int] = field(default_factory=set)

    @property
    def degree(self) -> int:
        return self.commitment_set.degree

    def derive_challenge(self, index: int):
        """Derive H(P(index)) and record the index as issued.

        Each index may be issued once; reuse would let two payments share a
        preimage and defeat the claim budget.
        """
        if index in self.issued:
            raise UsageError(f"index {index} already issued")
        element = challenge_for_index(self.commitment_set, index)
        self.issued.add(index)
        return element


def derive_challenge(plan: ChallengePlan, index: int):
    return plan.derive_challenge(index)


def eval_preimage(poly: SecretPolynomial, index: int) -> Preimage:
    """Receiver-side evaluation: the preimage that opens challenge ``index``."""
    if not 1 <= index < poly.modulus:
        raise UsageError(f"index must lie in [1, {poly.modulus})")
    return Preimage(index=index, value=poly.evaluate(index))


def verify_preimage(group: Group, challenge, candidate: Preimage) -> bool:
    """Does oneway(candidate.value) open the challenge element?"""
    if not 0 <= candidate.value < group.order:
        raise UsageError("preimage value outside the scalar range")
    return group.oneway(candidate.value) == challenge


def _lagrange_at_zero(points: list[tuple[int, int]], modulus: int) -> int:
    """Interpolate the unique polynomial through ``points`` and return P(0)."""
    total = 0
    for i, (xi, yi) in enumerate(points):
        num, den = 1, 1
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * xj % modulus
            den = den * (xj - xi) % modulus
        total = (total + yi * num * pow(den, -1, modulus)) % modulus
    return total


def recover_secret(preimages: list[Preimage], degree: int, modulus: int) -> int:
    """Recover P(0) from more than ``degree`` distinct revealed evaluations.

    This is the cheat proof: an honest receiver never reveals enough points
    for this call to succeed.  Duplicate indices are tolerated when they
    agree and rejected when they conflict.
    """
    seen: dict[int, int] = {}
    for p in preimages:
        if p.index in seen:
            if seen[p.index] != p.value:
                raise InconsistentEvidenceError(
                    f"index {p.index} revealed as both {seen[p.index]} and {p.value}"
                )
            continue
        seen[p.index] = p.value
    if len(seen) < degree + 1:
        raise InsufficientEvaluationsError(
            f"need {degree + 1} distinct evaluations, got {len(seen)}"
        )
    points = sorted(seen.items())[: degree + 1]
    return _lagrange_at_zero(points, modulus)


def verify_cheat_proof(commitment_set: CommitmentSet, secret: int) -> bool:
    """Check a recovered constant term against the published commitment H(P(0))."""
    group = commitment_set.group
    if not 0 <= secret < group.order:
        raise UsageError("secret outside the scalar range")
    return group.oneway(secret) == commitment_set.commitments[0]


def verify_payment_proof(plan: ChallengePlan, candidate: Preimage) -> bool:
    """Check a revealed preimage against an index this plan actually issued."""
    if candidate.index not in plan.issued:
        raise UsageError(f"index {candidate.index} was never issued")
    challenge = challenge_for_index(plan.commitment_set, candidate.index)
    return verify_preimage(plan.commitment_set.group, challenge, candidate)
