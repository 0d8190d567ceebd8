"""Prime-order group arithmetic behind the one-way function H(x) = g^x.

Two interchangeable backends live behind the same interface:

* ``toy-23-11``: the order-11 subgroup of Z_23*, generated by 2.  Small
  enough that tests can brute-force discrete logs and enumerate secrets.
* ``secp-curve``: secp256k1 with multiplicative notation, so ``mul`` is
  point addition and ``power`` is scalar multiplication.

Scalars are plain ints in ``[0, order)``.  Elements are backend-specific
(int residues for the modular group, affine point tuples or ``None`` for
the curve) and must only be combined through the owning ``Group``.

The homomorphism the rest of the package relies on:

    oneway(sum(c_i * x_i)) == combine([oneway(x_i)], [c_i])
"""

from __future__ import annotations

import secrets
from typing import Iterable, Sequence

from .errors import UsageError


def _is_prime(n: int) -> bool:
    # Deterministic Miller-Rabin, sufficient for any practical modulus size.
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _int_to_hex(value: int) -> str:
    length = max(1, (value.bit_length() + 7) // 8)
    return value.to_bytes(length, "big").hex()


class Group:
    """Shared interface for a cyclic group of prime order with generator g."""

    group_id: str
    order: int

    def generator(self):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        """Group operation."""
        raise NotImplementedError

    def power(self, a, exponent: int):
        """a raised to an integer exponent (reduced mod the group order)."""
        raise NotImplementedError

    def is_element(self, a) -> bool:
        raise NotImplementedError

    def oneway(self, x: int):
        """The homomorphic one-way function H(x) = g^x."""
        if not 0 <= x < self.order:
            raise UsageError(f"scalar {x} outside [0, {self.order})")
        return self.power(self.generator(), x)

    def combine(self, elements: Sequence, coefficients: Sequence[int]):
        """Product of elements[i] ** coefficients[i].

        This is the receiver-side evaluation of H applied to a linear
        combination of unknown scalars, using only their images.
        """
        if len(elements) == 0:
            raise UsageError("combine needs at least one element")
        if len(elements) != len(coefficients):
            raise UsageError(
                f"got {len(elements)} elements but {len(coefficients)} coefficients"
            )
        acc = self.identity()
        for elem, coeff in zip(elements, coefficients):
            acc = self.mul(acc, self.power(elem, coeff))
        return acc

    def random_scalar(self, rng=None) -> int:
        if rng is None:
            return secrets.randbelow(self.order)
        return rng.randrange(self.order)

    # Hex serialization: big-endian, lowercase, minimal even-length digits
    # for scalars; backend-defined canonical form for elements.

    def scalar_to_hex(self, x: int) -> str:
        if not 0 <= x < self.order:
            raise UsageError(f"scalar {x} outside [0, {self.order})")
        return _int_to_hex(x)

    def scalar_from_hex(self, text: str) -> int:
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise UsageError(f"bad scalar hex {text!r}") from exc
        if not 0 <= value < self.order:
            raise UsageError(f"scalar {value} outside [0, {self.order})")
        return value

    def element_to_hex(self, a) -> str:
        raise NotImplementedError

    def element_from_hex(self, text: str):
        raise NotImplementedError

    def element_to_bytes(self, a) -> bytes:
        return bytes.fromhex(self.element_to_hex(a))


class ModSubgroup(Group):
    """Order-q subgroup of Z_p*, written multiplicatively."""

    def __init__(self, group_id: str, modulus: int, order: int, generator: int):
        if not _is_prime(modulus) or not _is_prime(order):
            raise UsageError("modulus and order must both be prime")
        if (modulus - 1) % order != 0:
            raise UsageError("order must divide modulus - 1")
        if generator % modulus in (0, 1) or pow(generator, order, modulus) != 1:
            raise UsageError("generator does not have the requested order")
        self.group_id = group_id
        self.modulus = modulus
        self.order = order
        self._generator = generator % modulus

    def generator(self) -> int:
        return self._generator

    def identity(self) -> int:
        return 1

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def power(self, a: int, exponent: int) -> int:
        return pow(a, exponent % self.order, self.modulus)

    def is_element(self, a) -> bool:
        return (
            isinstance(a, int)
            and 0 < a < self.modulus
            and pow(a, self.order, self.modulus) == 1
        )

    def element_to_hex(self, a: int) -> str:
        if not self.is_element(a):
            raise UsageError(f"{a!r} is not an element of {self.group_id}")
        return _int_to_hex(a)

    def element_from_hex(self, text: str) -> int:
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise UsageError(f"bad element hex {text!r}") from exc
        if not self.is_element(value):
            raise UsageError(f"{value} is not an element of {self.group_id}")
        return value


# secp256k1 parameters.
_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
_GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

Point = tuple[int, int] | None


def _point_add(p1: Point, p2: Point) -> Point:
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2 and (y1 + y2) % _P == 0:
        return None
    if p1 == p2:
        lam = 3 * x1 * x1 * pow(2 * y1, _P - 2, _P) % _P
    else:
        lam = (y2 - y1) * pow(x2 - x1, _P - 2, _P) % _P
    x3 = (lam * lam - x1 - x2) % _P
    return (x3, (lam * (x1 - x3) - y1) % _P)


def _point_mul(p: Point, k: int) -> Point:
    acc: Point = None
    addend = p
    while k:
        if k & 1:
            acc = _point_add(acc, addend)
        addend = _point_add(addend, addend)
        k >>= 1
    return acc


class Secp256k1Group(Group):
    """secp256k1 in multiplicative notation; the identity is the point at infinity.

    Elements serialize to the usual 33-byte compressed form; the identity,
    which has no compressed encoding, serializes to the single byte 00.
    """

    def __init__(self, group_id: str = "secp-curve"):
        self.group_id = group_id
        self.order = _N

    def generator(self) -> Point:
        return (_GX, _GY)

    def identity(self) -> Point:
        return None

    def mul(self, a: Point, b: Point) -> Point:
        return _point_add(a, b)

    def power(self, a: Point, exponent: int) -> Point:
        return _point_mul(a, exponent % _N)

    def is_element(self, a) -> bool:
        if a is None:
            return True
        if not (isinstance(a, tuple) and len(a) == 2):
            return False
        x, y = a
        return 0 <= x < _P and 0 <= y < _P and (y * y - x * x * x - 7) % _P == 0

    def element_to_hex(self, a: Point) -> str:
        if not self.is_element(a):
            raise UsageError(f"{a!r} is not a point of {self.group_id}")
        if a is None:
            return "00"
        x, y = a
        prefix = b"\x03" if y & 1 else b"\x02"
        return (prefix + x.to_bytes(32, "big")).hex()

    def element_from_hex(self, text: str) -> Point:
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise UsageError(f"bad element hex {text!r}") from exc
        if raw == b"\x00":
            return None
        if len(raw) != 33 or raw[0] not in (2, 3):
            raise UsageError("compressed point must be 33 bytes with prefix 02 or 03")
        x = int.from_bytes(raw[1:], "big")
        if x >= _P:
            raise UsageError("point x coordinate out of range")
        y_sq = (pow(x, 3, _P) + 7) % _P
        y = pow(y_sq, (_P + 1) // 4, _P)
        if y * y % _P != y_sq:
            raise UsageError("x coordinate is not on the curve")
        if (y & 1) != (raw[0] & 1):
            y = _P - y
        return (x, y)


_REGISTRY: dict[str, Group] = {}


def get_group(group_id: str) -> Group:
    """Look up a group backend by its string identifier."""
    try:
        return _REGISTRY[group_id]
    except KeyError:
        raise UsageError(
            f"unknown group {group_id!r}; available: {sorted(_REGISTRY)}"
        ) from None


def available_groups() -> Iterable[str]:
    return sorted(_REGISTRY)


_REGISTRY["toy-23-11"] = ModSubgroup("toy-23-11", modulus=23, order=11, generator=2)
_REGISTRY["secp-curve"] = Secp256k1Group()
