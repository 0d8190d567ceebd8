"""Counterparty-risk-free redundancy for multi-path payments.

The pieces, bottom up:

``group``      prime-order group backends for the one-way function g^x
``challenge``  polynomial challenges bounding a receiver's claims
``contract``   reversible escrows, timeout staggering, transfer stages
``scripts``    locking-script templates for on-chain settlement
``adaptor``    Schnorr and two-party adaptor signatures
``simnet``     deterministic payment-network simulator and metrics
``sweep``      experiment grids, aggregation, delimited reports
``plotting``   metric figures rendered beside the reports
"""

from .challenge import (
    ChallengePlan,
    CommitmentSet,
    Preimage,
    SecretPolynomial,
    derive_challenge,
    eval_preimage,
    recover_secret,
    setup,
    verify_cheat_proof,
    verify_payment_proof,
    verify_preimage,
)
from .contract import (
    BoomerangContract,
    ContractChain,
    ContractState,
    HopTimeouts,
    Payout,
    deploy,
    run_transfer_stages,
    stagger_timeouts,
)
from .errors import (
    BoomerangError,
    ConfigError,
    InconsistentEvidenceError,
    InsufficientEvaluationsError,
    UsageError,
    VerificationError,
    WindowClosedError,
)
from .group import Group, available_groups, get_group
from .scripts import SCRIPT_KINDS, emit_script, required_placeholders

__version__ = "0.1.0"

__all__ = [
    "BoomerangContract",
    "BoomerangError",
    "ChallengePlan",
    "CommitmentSet",
    "ConfigError",
    "ContractChain",
    "ContractState",
    "Group",
    "HopTimeouts",
    "InconsistentEvidenceError",
    "InsufficientEvaluationsError",
    "Payout",
    "Preimage",
    "SCRIPT_KINDS",
    "SecretPolynomial",
    "UsageError",
    "VerificationError",
    "WindowClosedError",
    "available_groups",
    "deploy",
    "derive_challenge",
    "emit_script",
    "eval_preimage",
    "get_group",
    "recover_secret",
    "required_placeholders",
    "run_transfer_stages",
    "setup",
    "stagger_timeouts",
    "verify_cheat_proof",
    "verify_payment_proof",
    "verify_preimage",
    "__version__",
]
