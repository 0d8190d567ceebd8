import itertools
import random

import pytest

from boomerang.challenge import (
    ChallengePlan,
    CommitmentSet,
    Preimage,
    SecretPolynomial,
    challenge_for_index,
    eval_preimage,
    recover_secret,
    setup,
    verify_cheat_proof,
    verify_payment_proof,
    verify_preimage,
)
from boomerang.errors import (
    InconsistentEvidenceError,
    InsufficientEvaluationsError,
    UsageError,
)
from boomerang.group import get_group

TOY = get_group("toy-23-11")


class TestPolynomial:
    def test_known_evaluations(self):
        # P(x) = 3 + 5x over Z_11: P(1) = 8, P(2) = 13 = 2 mod 11
        poly = SecretPolynomial(coefficients=(3, 5), modulus=11)
        assert poly.evaluate(1) == 8
        assert poly.evaluate(2) == 2
        assert poly.secret == 3

    def test_eval_preimage_bounds(self):
        poly = SecretPolynomial(coefficients=(3, 5), modulus=11)
        assert eval_preimage(poly, 1) == Preimage(1, 8)
        with pytest.raises(UsageError):
            eval_preimage(poly, 0)
        with pytest.raises(UsageError):
            eval_preimage(poly, 11)


class TestSetup:
    def test_setup_commits_to_coefficients(self, rng):
        poly, commitments = setup(TOY, degree=3, rng=rng)
        assert poly.degree == 3
        assert len(commitments.commitments) == 4
        for coeff, image in zip(poly.coefficients, commitments.commitments):
            assert TOY.oneway(coeff) == image

    def test_degree_validation(self, rng):
        with pytest.raises(UsageError):
            setup(TOY, degree=0, rng=rng)
        with pytest.raises(UsageError):
            setup(TOY, degree=10, rng=rng)  # needs 11 distinct indices, only 10 exist

    def test_coefficients_uniform_smoke(self):
        # every field value shows up as a coefficient across many setups
        rnd = random.Random(5)
        seen = set()
        for _ in range(300):
            poly, _ = setup(TOY, degree=1, rng=rnd)
            seen.update(poly.coefficients)
        assert seen == set(range(11))


class TestChallengeDerivation:
    def test_derived_equals_direct_image(self):
        # receiver computes H(P(i)) directly; sender only combines commitments
        poly = SecretPolynomial(coefficients=(3, 5), modulus=11)
        commitments = CommitmentSet(
            group=TOY, commitments=tuple(TOY.oneway(c) for c in (3, 5))
        )
        for i in range(1, 11):
            assert challenge_for_index(commitments, i) == TOY.oneway(poly.evaluate(i))

    def test_known_challenge_value(self):
        # P(1) = 8 so the challenge for index 1 is 2^8 = 256 = 3 mod 23
        commitments = CommitmentSet(
            group=TOY, commitments=(TOY.oneway(3), TOY.oneway(5))
        )
        assert challenge_for_index(commitments, 1) == pow(2, 8, 23)

    def test_plan_refuses_duplicate_issue(self):
        _, commitments = setup(TOY, degree=2, rng=random.Random(0))
        plan = ChallengePlan(commitment_set=commitments)
        plan.derive_challenge(1)
        plan.derive_challenge(2)
        with pytest.raises(UsageError):
            plan.derive_challenge(1)
        assert plan.issued == {1, 2}

    def test_index_bounds(self):
        _, commitments = setup(TOY, degree=2, rng=random.Random(0))
        with pytest.raises(UsageError):
            challenge_for_index(commitments, 0)
        with pytest.raises(UsageError):
            challenge_for_index(commitments, 11)

    def test_verify_preimage(self, rng):
        poly, commitments = setup(TOY, degree=2, rng=rng)
        for i in range(1, 6):
            challenge = challenge_for_index(commitments, i)
            assert verify_preimage(TOY, challenge, eval_preimage(poly, i))
            wrong = Preimage(i, (poly.evaluate(i) + 1) % 11)
            assert not verify_preimage(TOY, challenge, wrong)


class TestRecovery:
    def test_known_lagrange_recovery(self):
        # through (1, 8) and (2, 2): constant term is 3
        assert recover_secret([Preimage(1, 8), Preimage(2, 2)], 1, 11) == 3

    def test_recovery_matches_setup_secret(self, rng):
        for _ in range(50):
            degree = rng.randrange(1, 5)
            poly, commitments = setup(TOY, degree=degree, rng=rng)
            points = [eval_preimage(poly, i) for i in range(1, degree + 2)]
            secret = recover_secret(points, degree, 11)
            assert secret == poly.secret
            assert verify_cheat_proof(commitments, secret)

    def test_any_subset_recovers(self, rng):
        poly, _ = setup(TOY, degree=2, rng=rng)
        points = [eval_preimage(poly, i) for i in range(1, 8)]
        for subset in itertools.combinations(points, 3):
            assert recover_secret(list(subset), 2, 11) == poly.secret

    def test_insufficient_points(self):
        poly = SecretPolynomial(coefficients=(3, 5, 7), modulus=11)
        points = [eval_preimage(poly, i) for i in (1, 2)]
        with pytest.raises(InsufficientEvaluationsError):
            recover_secret(points, 2, 11)
        # duplicates of one index do not count twice
        with pytest.raises(InsufficientEvaluationsError):
            recover_secret(points + [points[0]], 2, 11)

    def test_conflicting_duplicates_rejected(self):
        points = [Preimage(1, 8), Preimage(2, 2), Preimage(1, 9)]
        with pytest.raises(InconsistentEvidenceError):
            recover_secret(points, 1, 11)

    def test_underdetermined_below_threshold(self):
        """Brute force: v evaluations fix nothing about the constant term.

        For every value a in the field there is exactly one degree-v
        polynomial with P(0) = a matching the v revealed points.
        """
        q = 11
        rnd = random.Random(3)
        for degree in (1, 2):
            poly, _ = setup(TOY, degree=degree, rng=rnd)
            revealed = [(i, poly.evaluate(i)) for i in range(1, degree + 1)]
            consistent_secrets = []
            for coeffs in itertools.product(range(q), repeat=degree + 1):
                cand = SecretPolynomial(coefficients=coeffs, modulus=q)
                if all(cand.evaluate(i) == y for i, y in revealed):
                    consistent_secrets.append(cand.secret)
            assert sorted(consistent_secrets) == list(range(q))


class TestProofs:
    def test_cheat_proof_rejects_wrong_secret(self, rng):
        poly, commitments = setup(TOY, degree=1, rng=rng)
        assert verify_cheat_proof(commitments, poly.secret)
        assert not verify_cheat_proof(commitments, (poly.secret + 1) % 11)

    def test_payment_proof_requires_issued_index(self, rng):
        poly, commitments = setup(TOY, degree=1, rng=rng)
        plan = ChallengePlan(commitment_set=commitments)
        plan.derive_challenge(3)
        assert verify_payment_proof(plan, eval_preimage(poly, 3))
        assert not verify_payment_proof(plan, Preimage(3, (poly.evaluate(3) + 1) % 11))
        with pytest.raises(UsageError):
            verify_payment_proof(plan, eval_preimage(poly, 4))


class TestSerialization:
    def test_commitment_set_round_trip(self, rng):
        _, commitments = setup(TOY, degree=2, rng=rng)
        again = CommitmentSet.from_json(commitments.to_json())
        assert again.commitments == commitments.commitments
        assert again.group.group_id == "toy-23-11"

    def test_commitment_set_secp(self, rng):
        secp = get_group("secp-curve")
        _, commitments = setup(secp, degree=1, rng=rng)
        again = CommitmentSet.from_json(commitments.to_json())
        assert again.commitments == commitments.commitments

    def test_preimage_round_trip(self):
        p = Preimage(index=4, value=9)
        assert Preimage.from_json(p.to_json()) == p
