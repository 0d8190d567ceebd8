"""Acceptance gate: nine end-to-end checks, one verdict line each.

Each test prints ``ACCEPTANCE <n>: PASS`` (or FAIL) so the suite's captured
output doubles as a checklist.  Criteria 6 and 7 share one desk-scale sweep
run through a module fixture.
"""

import itertools
import random
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from statistics import mean

import numpy as np
import pytest

from boomerang import adaptor, scripts
from boomerang.challenge import (
    ChallengePlan,
    SecretPolynomial,
    eval_preimage,
    recover_secret,
    setup,
    verify_cheat_proof,
    verify_preimage,
)
from boomerang.contract import (
    BoomerangContract,
    ContractState,
    as_funds,
    deploy,
    stagger_timeouts,
)
from boomerang.errors import BoomerangError
from boomerang.group import get_group
from boomerang.simnet.engine import run_experiment_result
from boomerang.simnet.traces import gen_transfers
from boomerang.sweep import load_config, transfers_for_seed

ROOT = Path(__file__).parent.parent
TOY = get_group("toy-23-11")
CURVE = get_group("secp-curve")


def verdict(number, ok, detail):
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {number}: {detail}"


def test_acceptance_1_challenge_soundness():
    """1000 randomized trials: issued challenges open only with the right
    preimage, and any v+1 revealed preimages reconstruct the constant term."""
    rng = random.Random(20260823)
    start = time.perf_counter()
    trials = 1000
    for _ in range(trials):
        v = rng.randrange(1, 6)
        u = rng.randrange(0, 6)
        poly, commitments = setup(TOY, degree=v, rng=rng)
        plan = ChallengePlan(commitment_set=commitments)
        # the toy group offers indices 1..10, so w caps out there
        w = min(v + u + 1, TOY.order - 1)
        indices = rng.sample(range(1, TOY.order), w)
        preimages = []
        for i in indices:
            challenge_elem = plan.derive_challenge(i)
            pre = eval_preimage(poly, i)
            assert challenge_elem == TOY.oneway(poly.evaluate(i))
            assert verify_preimage(TOY, challenge_elem, pre)
            wrong = dataclass_with_value(pre, (pre.value + 1) % TOY.order)
            assert not verify_preimage(TOY, challenge_elem, wrong)
            preimages.append(pre)
        subset = rng.sample(preimages, v + 1)
        secret = recover_secret(subset, degree=v, modulus=TOY.order)
        assert secret == poly.secret
        assert verify_cheat_proof(commitments, secret)
    elapsed = time.perf_counter() - start
    verdict(1, elapsed < 10.0, f"{trials} trials in {elapsed:.2f}s")


def dataclass_with_value(pre, value):
    return type(pre)(index=pre.index, value=value)


def test_acceptance_2_underdetermination():
    """For every size-v set of revealed evaluations, every candidate constant
    term admits exactly one consistent polynomial: v reveals leak nothing."""
    q = 11
    rng = random.Random(2)
    start = time.perf_counter()
    checked = 0
    for v in (1, 2, 3):
        coefficients = tuple(rng.randrange(q) for _ in range(v + 1))
        poly = SecretPolynomial(coefficients=coefficients, modulus=q)
        combos = np.array(list(itertools.product(range(q), repeat=v)), dtype=np.int64)
        for points in itertools.combinations(range(1, q), v):
            targets = np.array([poly.evaluate(x) for x in points], dtype=np.int64)
            powers = np.array(
                [[pow(x, j, q) for x in points] for j in range(1, v + 1)],
                dtype=np.int64,
            )
            # rows: all q^v choices of the non-constant coefficients
            partial = combos @ powers % q
            for candidate in range(q):
                consistent = np.all((partial + candidate) % q == targets, axis=1)
                count = int(consistent.sum())
                assert count == 1, (v, points, candidate, count)
                checked += 1
    elapsed = time.perf_counter() - start
    verdict(2, elapsed < 5.0, f"{checked} (subset, candidate) cells in {elapsed:.2f}s")


def test_acceptance_3_contract_interleavings():
    """Breadth-first enumeration over a 10-tick clock reaches every contract
    state exactly through legal windows, and settlement admits only the three
    payout splits, all conserving funds."""
    start = time.perf_counter()
    forward = TOY.oneway(8)   # preimage 8
    revert = TOY.oneway(3)    # secret 3
    amount, fee = as_funds(1), as_funds("0.01")
    delta_fwd, delta_rev = 4.0, 7.0

    def fresh(state):
        c = deploy(TOY, forward, revert, amount, fee, 0.0, delta_fwd, delta_rev)
        c.state = state
        return c

    from boomerang.challenge import Preimage

    actions = {
        "cf_good": lambda c, t: c.claim_forward(Preimage(1, 8), now=t),
        "cf_bad": lambda c, t: c.claim_forward(Preimage(1, 9), now=t),
        "cr_good": lambda c, t: c.claim_reverse(3, now=t),
        "cr_bad": lambda c, t: c.claim_reverse(4, now=t),
        "expire": lambda c, t: c.expire(now=t),
        "cancel": lambda c, t: c.cancel(),
        "renounce": lambda c, t: c.renounce(),
    }

    reachable = {ContractState.DEPLOYED}
    transitions = set()
    for tick in range(11):
        frontier = set(reachable)
        for state in frontier:
            for name, action in actions.items():
                c = fresh(state)
                try:
                    action(c, float(tick))
                except BoomerangError:
                    assert c.state is state  # rejected moves change nothing
                    continue
                transitions.add((state, name, tick, c.state))
                reachable.add(c.state)

    assert reachable == set(ContractState)
    # window edges: forward claims stop after tick 4, expiry starts at 5
    cf_ticks = {t for (s, n, t, _) in transitions if n == "cf_good"}
    assert cf_ticks == set(range(0, 5))
    assert not any(n == "cf_bad" for (_, n, _, _) in transitions)
    assert not any(n == "cr_bad" for (_, n, _, _) in transitions)
    expire_ticks = {t for (s, n, t, _) in transitions if n == "expire"}
    assert expire_ticks == set(range(5, 11))
    cr_sources = {s for (s, n, _, _) in transitions if n == "cr_good"}
    assert cr_sources == {ContractState.FORWARD_CLAIMED}

    # settle every reachable end state at tick 10
    payouts = set()
    for state in reachable:
        c = fresh(state)
        if state is ContractState.DEPLOYED:
            c.expire(now=10.0)
        p = c.settle(now=10.0)
        assert p.to_p1 + p.to_p2 == amount + fee
        assert p.to_p2 >= 0 and p.to_p1 >= 0
        payouts.add((p.to_p1, p.to_p2))
    total = amount + fee
    expected = {
        (total, Fraction(0)),        # never claimed
        (Fraction(0), total),        # claim stood
        (amount, fee),               # claim reverted
    }
    ok = payouts == expected
    elapsed = time.perf_counter() - start
    verdict(3, ok and elapsed < 5.0,
            f"{len(transitions)} transitions, {len(payouts)} payout splits, {elapsed:.2f}s")


def test_acceptance_4_timeout_staggering():
    """Windows shrink/grow one step per hop; three hops give 3,2,1 / 4,5,6."""
    ok = True
    for n in range(1, 21):
        t = stagger_timeouts(n, t0=0.0, step=1.0)
        fwd = [w[0] for w in t.windows]
        rev = [w[1] for w in t.windows]
        ok = ok and all(a > b for a, b in zip(fwd, fwd[1:]))
        ok = ok and all(a < b for a, b in zip(rev, rev[1:]))
        ok = ok and max(fwd) < min(rev)
    three = stagger_timeouts(3, t0=0.0, step=1.0)
    ok = ok and [w[0] for w in three.windows] == [3.0, 2.0, 1.0]
    ok = ok and [w[1] for w in three.windows] == [4.0, 5.0, 6.0]
    verdict(4, ok, "n=1..20 monotone, n=3 coefficients 3,2,1 / 4,5,6")


def test_acceptance_5_adaptor_round_trips():
    """1000 complete/extract inverse pairs verify under the aggregate key."""
    rng = random.Random(5)
    start = time.perf_counter()
    trials = 0
    for group, count in ((TOY, 975), (CURVE, 25)):
        for _ in range(count):
            kp1, kp2 = adaptor.keygen(group, rng), adaptor.keygen(group, rng)
            t = group.random_scalar(rng)
            commitment = group.oneway(t)
            message = trials.to_bytes(4, "big")
            sig, _ = adaptor.adaptor_sign(group, kp1, kp2, commitment, message, rng)
            done = adaptor.complete(group, sig, t)
            joint = adaptor.aggregate_key(group, kp1.public, kp2.public)
            assert adaptor.schnorr_verify(group, joint, message, done)
            assert adaptor.extract(group, done, sig) == t
            trials += 1
    elapsed = time.perf_counter() - start
    verdict(5, trials == 1000, f"{trials} trials in {elapsed:.2f}s")


@pytest.fixture(scope="module")
def desk_sweep():
    """Every (scheme, u, seed) cell of configs/desk_scale.json, with full
    per-transfer outcomes retained."""
    spec = load_config(str(ROOT / "configs" / "desk_scale.json"))
    start = time.perf_counter()
    results = {}
    for seed in spec.seeds:
        transfers = transfers_for_seed(spec, seed)
        for scheme in spec.schemes:
            for u in spec.u_values:
                cfg = replace(spec.base, scheme=scheme, num_redundant_tx=u, seed=seed)
                results[(scheme, u, seed)] = run_experiment_result(
                    cfg, transfers, random.Random(seed)
                )
    return spec, results, time.perf_counter() - start


def test_acceptance_6_simulator_invariants(desk_sweep):
    """Desk-scale sweep: conservation, atomicity, no overdraw, no stuck locks."""
    spec, results, elapsed = desk_sweep
    assert spec.base.num_nodes == 20
    assert spec.base.ring_neighbors == 8
    assert spec.base.rewire_prob == 0.8
    assert spec.base.num_transfers == 2000
    assert spec.base.num_base_tx == 5
    assert spec.u_values == [0, 5, 10]
    assert len(spec.seeds) == 5
    assert len(results) == 45
    for key, result in results.items():
        report = result.invariant_report(spec.base.num_base_tx)
        assert report["funds_conserved"], key
        assert report["residual_locked"] == 0, key
        assert report["atomic"], key
        assert report["no_overdraw"], key
        assert len(result.outcomes) == 2000, key
    verdict(6, elapsed < 300.0, f"45 cells, all invariants, {elapsed:.1f}s")


def test_acceptance_7_scheme_trends(desk_sweep):
    """Redundancy beats retry at u=v on throughput and TTC; TTC curves move
    the right way with budget; u=0 removes any difference between schemes."""
    spec, results, _ = desk_sweep
    seeds = spec.seeds
    v = spec.base.num_base_tx

    def mean_metric(scheme, u, metric):
        return mean(getattr(results[(scheme, u, s)], metric)() for s in seeds)

    throughput_ratio = mean_metric("redundancy", v, "throughput") / mean_metric(
        "retry", v, "throughput"
    )
    ttc_ratio = mean_metric("redundancy", v, "ttc") / mean_metric("retry", v, "ttc")

    def violations(scheme, direction):
        curve = [mean_metric(scheme, u, "ttc") for u in spec.u_values]
        deltas = [b - a for a, b in zip(curve, curve[1:])]
        bad = [d for d in deltas if (d < 0 if direction == "up" else d > 0)]
        return len(bad)

    retry_violations = violations("retry", "up")
    redundancy_violations = violations("redundancy", "down")

    identical_at_zero = all(
        [vars(o) for o in results[("retry", 0, s)].outcomes]
        == [vars(o) for o in results[(scheme, 0, s)].outcomes]
        for s in seeds
        for scheme in ("redundancy", "redundant-retry-10")
    )

    ok = (
        throughput_ratio >= 1.3
        and ttc_ratio <= 0.8
        and retry_violations <= 1
        and redundancy_violations <= 1
        and identical_at_zero
    )
    verdict(
        7,
        ok,
        f"throughput x{throughput_ratio:.3f}, ttc x{ttc_ratio:.3f}, "
        f"ttc-curve violations {retry_violations}/{redundancy_violations}, "
        f"u=0 identical: {identical_at_zero}",
    )


def test_acceptance_8_full_scale_config():
    """The headline experiment grid fits in one config file, and the same
    machinery executes it (smoke-tested at a reduced transfer count)."""
    spec = load_config(str(ROOT / "configs" / "full_scale.json"))
    ok = (
        spec.base.num_nodes == 100
        and spec.base.num_base_tx == 25
        and spec.base.num_transfers == 50000
        and spec.base.ring_neighbors == 8
        and spec.base.rewire_prob == 0.8
        and spec.u_values[0] == 0
        and spec.u_values[-1] == 150
        and spec.u_values == sorted(spec.u_values)
        and spec.schemes == ["retry", "redundancy", "redundant-retry-10"]
        and spec.seeds == list(range(10))
    )
    assert ok

    cfg = replace(spec.base, num_transfers=300, scheme="redundancy",
                  num_redundant_tx=25, seed=0)
    transfers = gen_transfers(cfg, random.Random("trace-0"))
    result = run_experiment_result(cfg, transfers, random.Random(0))
    report = result.invariant_report(cfg.num_base_tx)
    smoke = (
        len(result.outcomes) == 300
        and report["funds_conserved"]
        and report["atomic"]
        and any(o.success for o in result.outcomes)
    )
    verdict(8, ok and smoke, "grid config valid, 300-transfer smoke run clean")


def test_acceptance_9_script_golden_files():
    """All three locking-script templates match their golden files verbatim."""
    placeholders = {
        "generator": "02",
        "forward_challenge": "08",
        "revert_challenge": "09",
        "tmp_key_p1": "0a11",
        "tmp_key_p2": "0b22",
        "locktime_forward": "96",
        "locktime_reverse": "d2",
        "key_p1": "0a01",
        "key_p2": "0b02",
    }
    golden_dir = Path(__file__).parent / "golden"
    ok = True
    for kind in scripts.SCRIPT_KINDS:
        values = {name: placeholders[name] for name in scripts.required_placeholders(kind)}
        text = scripts.emit_script(kind, values)
        ok = ok and text == (golden_dir / f"{kind}.txt").read_text()
        for opcode in ("ECEXP<", "EQUALVERIFY", "CHECKLOCKTIMEVERIFY"):
            ok = ok and opcode in text
    ok = ok and "CHECKMULTISIGVERIFY" in scripts.emit_script(
        "settle_funds",
        {n: placeholders[n] for n in scripts.required_placeholders("settle_funds")},
    )
    verdict(9, ok, "fee, retaliate, settle_funds all byte-identical to golden")
