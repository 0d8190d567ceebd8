"""Locking-script templates for on-chain settlement of one hop.

The scripts assume a hypothetical ECEXP opcode that pops a scalar and pushes
the group element generator^scalar, which lets the chain check our
discrete-log conditions directly.  Emission is text only: placeholders are
substituted into fixed opcode sequences, one line per branch step.

Three outputs cover one hop's escrow:

* ``settle_funds``: the amount; claimable with the payment preimage into a
  2-of-2 between throwaway keys (so it can feed a retaliate transaction),
  or refunded to P1 after the forward window.
* ``retaliate``: spends the settled funds back to P1 on the overdraw
  secret, or releases them to P2 after the reverse window.
* ``fee``: the fee sliver; P2 takes it with the same payment preimage,
  P1 refunds it after the forward window.
"""

from __future__ import annotations

from .errors import UsageError

_TEMPLATES = {
    "settle_funds": (
        "IF\n"
        "    ECEXP<{generator}>  PUSH<{forward_challenge}>  EQUALVERIFY\n"
        "    2  PUSH<{tmp_key_p1}>  PUSH<{tmp_key_p2}>  2  CHECKMULTISIGVERIFY\n"
        "ELSE\n"
        "    PUSH<{locktime_forward}>  CHECKLOCKTIMEVERIFY  DROP\n"
        "    PUSH<{key_p1}>  CHECKSIGVERIFY\n"
        "ENDIF\n"
    ),
    "retaliate": (
        "IF\n"
        "    ECEXP<{generator}>  PUSH<{revert_challenge}>  EQUALVERIFY\n"
        "    PUSH<{key_p1}>  CHECKSIGVERIFY\n"
        "ELSE\n"
        "    PUSH<{locktime_reverse}>  CHECKLOCKTIMEVERIFY  DROP\n"
        "    PUSH<{key_p2}>  CHECKSIGVERIFY\n"
        "ENDIF\n"
    ),
    "fee": (
        "IF\n"
        "    ECEXP<{generator}>  PUSH<{forward_challenge}>  EQUALVERIFY\n"
        "    PUSH<{key_p2}>  CHECKSIGVERIFY\n"
        "ELSE\n"
        "    PUSH<{locktime_forward}>  CHECKLOCKTIMEVERIFY  DROP\n"
        "    PUSH<{key_p1}>  CHECKSIGVERIFY\n"
        "ENDIF\n"
    ),
}

_PLACEHOLDERS = {
    "settle_funds": (
        "generator",
        "forward_challenge",
        "tmp_key_p1",
        "tmp_key_p2",
        "locktime_forward",
        "key_p1",
    ),
    "retaliate": (
        "generator",
        "revert_challenge",
        "key_p1",
        "locktime_reverse",
        "key_p2",
    ),
    "fee": (
        "generator",
        "forward_challenge",
        "key_p2",
        "locktime_forward",
        "key_p1",
    ),
}

SCRIPT_KINDS = tuple(sorted(_TEMPLATES))


def required_placeholders(kind: str) -> tuple[str, ...]:
    if kind not in _TEMPLATES:
        raise UsageError(f"unknown script kind {kind!r}; available: {list(SCRIPT_KINDS)}")
    return _PLACEHOLDERS[kind]


def _check_hex(name: str, value: str) -> str:
    if not isinstance(value, str) or not value:
        raise UsageError(f"placeholder {name!r} must be a nonempty hex string")
    lowered = value.lower()
    if any(c not in "0123456789abcdef" for c in lowered):
        raise UsageError(f"placeholder {name!r} is not hex: {value!r}")
    return lowered


def emit_script(kind: str, placeholders: dict[str, str]) -> str:
    """Render one script kind with all placeholders substituted as hex."""
    required = required_placeholders(kind)
    missing = [name for name in required if name not in placeholders]
    if missing:
        raise UsageError(f"missing placeholders for {kind}: {missing}")
    extra = [name for name in placeholders if name not in required]
    if extra:
        raise UsageError(f"unknown placeholders for {kind}: {sorted(extra)}")
    values = {name: _check_hex(name, placeholders[name]) for name in required}
    return _TEMPLATES[kind].format(**values)
