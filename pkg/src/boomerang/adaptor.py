"""Schnorr signatures and two-party adaptor signing over any ``Group``.

The adaptor flow ties a cooperative channel update to a challenge element T:
both parties exchange nonce points and partial signatures that are one
scalar short of valid.  Whoever learns t with generator^t == T can complete
the signature, and publishing the completed signature hands the other party
t via ``extract``.  Instantiated with a payment challenge H(P(i)), this
makes "signature became valid" and "preimage was revealed" the same event.

The challenge hash is SHA-256 over length-prefixed serialized components,
reduced mod the group order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import UsageError, VerificationError
from .group import Group, get_group


@dataclass(frozen=True)
class KeyPair:
    secret: int
    public: object


@dataclass(frozen=True)
class SchnorrSignature:
    nonce_point: object
    s: int

    def to_json(self, group: Group) -> str:
        return json.dumps(
            {
                "group": group.group_id,
                "nonce_point": group.element_to_hex(self.nonce_point),
                "s": group.scalar_to_hex(self.s),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> tuple["SchnorrSignature", Group]:
        data = json.loads(text)
        group = get_group(data["group"])
        return (
            cls(
                nonce_point=group.element_from_hex(data["nonce_point"]),
                s=group.scalar_from_hex(data["s"]),
            ),
            group,
        )


@dataclass(frozen=True)
class AdaptorSignature:
    """A joint signature missing exactly the discrete log of ``commitment``."""

    aggregate_nonce: object
    s_prime: int
    commitment: object

    def to_json(self, group: Group) -> str:
        return json.dumps(
            {
                "group": group.group_id,
                "aggregate_nonce": group.element_to_hex(self.aggregate_nonce),
                "s_prime": group.scalar_to_hex(self.s_prime),
                "commitment": group.element_to_hex(self.commitment),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> tuple["AdaptorSignature", Group]:
        data = json.loads(text)
        group = get_group(data["group"])
        return (
            cls(
                aggregate_nonce=group.element_from_hex(data["aggregate_nonce"]),
                s_prime=group.scalar_from_hex(data["s_prime"]),
                commitment=group.element_from_hex(data["commitment"]),
            ),
            group,
        )


def keygen(group: Group, rng=None) -> KeyPair:
    secret = group.random_scalar(rng)
    return KeyPair(secret=secret, public=group.oneway(secret))


def challenge_scalar(group: Group, *parts) -> int:
    """SHA-256 of length-prefixed parts, reduced mod the group order.

    Parts may be group elements or raw bytes; elements use their canonical
    serialized form.
    """
    hasher = hashlib.sha256()
    for part in parts:
        if isinstance(part, bytes):
            data = part
        else:
            data = group.element_to_bytes(part)
        hasher.update(len(data).to_bytes(4, "big"))
        hasher.update(data)
    return int.from_bytes(hasher.digest(), "big") % group.order


def schnorr_sign(group: Group, keypair: KeyPair, message: bytes, rng=None) -> SchnorrSignature:
    r = group.random_scalar(rng)
    nonce_point = group.oneway(r)
    e = challenge_scalar(group, keypair.public, nonce_point, message)
    s = (r + e * keypair.secret) % group.order
    return SchnorrSignature(nonce_point=nonce_point, s=s)


def schnorr_verify(group: Group, public, message: bytes, sig: SchnorrSignature) -> bool:
    if not 0 <= sig.s < group.order:
        raise UsageError("signature scalar outside the field")
    e = challenge_scalar(group, public, sig.nonce_point, message)
    lhs = group.oneway(sig.s)
    rhs = group.mul(sig.nonce_point, group.power(public, e))
    return lhs == rhs


def aggregate_key(group: Group, public1, public2):
    return group.mul(public1, public2)


def adaptor_sign(
    group: Group,
    keypair1: KeyPair,
    keypair2: KeyPair,
    commitment,
    message: bytes,
    rng=None,
) -> tuple[AdaptorSignature, tuple[int, int]]:
    """Both parties' halves of an adaptor signature under their joint key.

    Returns the adaptor signature plus the two partial scalars, which each
    party retains to later extract the committed secret from the completed
    signature.
    """
    if not group.is_element(commitment):
        raise UsageError("commitment is not a group element")
    r1 = group.random_scalar(rng)
    r2 = group.random_scalar(rng)
    nonce1 = group.oneway(r1)
    nonce2 = group.oneway(r2)
    joint_key = aggregate_key(group, keypair1.public, keypair2.public)
    aggregate_nonce = group.mul(group.mul(nonce1, nonce2), commitment)
    e = challenge_scalar(group, joint_key, aggregate_nonce, message)
    s1 = (r1 + e * keypair1.secret) % group.order
    s2 = (r2 + e * keypair2.secret) % group.order
    adaptor = AdaptorSignature(
        aggregate_nonce=aggregate_nonce,
        s_prime=(s1 + s2) % group.order,
        commitment=commitment,
    )
    return adaptor, (s1, s2)


def complete(group: Group, adaptor: AdaptorSignature, secret: int) -> SchnorrSignature:
    """Turn the adaptor signature into a valid one using the committed secret."""
    if not 0 <= secret < group.order:
        raise UsageError("secret outside the scalar range")
    if group.oneway(secret) != adaptor.commitment:
        raise VerificationError("secret does not match the adaptor commitment")
    return SchnorrSignature(
        nonce_point=adaptor.aggregate_nonce,
        s=(adaptor.s_prime + secret) % group.order,
    )


def extract(group: Group, completed: SchnorrSignature, adaptor: AdaptorSignature) -> int:
    """Recover the committed secret from a completed signature."""
    if completed.nonce_point != adaptor.aggregate_nonce:
        raise UsageError("completed signature does not belong to this adaptor")
    return (completed.s - adaptor.s_prime) % group.order
