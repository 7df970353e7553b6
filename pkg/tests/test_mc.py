"""Exact oracles, Monte Carlo estimation, scaling fits, envelope checks."""

import math
from fractions import Fraction as F
from functools import partial as bind

import pytest

from cutofflab import adversaries, core, learners, mc
from cutofflab.errors import BudgetExceededError, PreconditionError

NAT = core.Point.nat
HALF = F(1, 2)


def fixed_instance(gamma=HALF):
    cls = core.CantorClass(gamma, 2, 6)
    witness = cls.hypothesis({5, 6})
    dist = core.FiniteDistribution.from_triples(
        [(NAT(5), 0, F(3, 4)), (NAT(6), 0, F(1, 4))], witness=witness
    )
    return adversaries.HardInstance(
        theorem="test", cls=cls, distribution=dist, witness=witness,
        gamma=gamma, epsilon=None, d=2, universe=6, n_max=None,
    )


class ConstantLearner:
    """Learner ignoring its samples; used for degenerate oracles."""

    sample_arity = 1

    def __init__(self, value):
        self.value = F(value)

    def predictor(self, samples):
        return lambda x: self.value


class WitnessLearner:
    sample_arity = 1

    def __init__(self, witness):
        self.witness = witness

    def predictor(self, samples):
        return self.witness.value_at


class TestExactOracle:
    def test_witness_learner_zero(self):
        inst = fixed_instance()
        assert mc.exact_expected_loss(WitnessLearner(inst.witness), inst, 3) == 0

    def test_constant_far_predictor_one(self):
        inst = fixed_instance()
        assert mc.exact_expected_loss(ConstantLearner(1), inst, 2) == 1

    def test_thm1_reference_value(self):
        # hand-checkable: single block, min rule; sequences (5,5),(5,6),(6,5),(6,6)
        cls = core.CantorClass(HALF, 2, 5)
        inst, cert = adversaries.thm1_instance(cls, HALF, F(1, 32))
        adversary = bind(learners.adversarial_interpolator, cert)
        learner = learners.InterpolatorAggregation(
            adversary, learners.DisjointBlocks(1), learners.Median()
        )
        value = mc.exact_expected_loss(learner, inst, 2)
        # missing light point w.p. (7/8)^2 costs 1/8; missing heavy w.p.
        # (1/8)^2 costs 7/8; mixed sequences interpolate everything
        assert value == F(49, 64) * F(1, 8) + F(1, 64) * F(7, 8)

    def test_budget_refusal(self):
        inst = fixed_instance()
        with pytest.raises(BudgetExceededError):
            mc.exact_expected_loss(ConstantLearner(0), inst, 30)

    def test_median_learner_enumerates_triple_product(self):
        inst = fixed_instance()
        interp = bind(learners.generic_interpolator, inst.cls)
        value = mc.exact_expected_loss(learners.MedianOfThree(interp), inst, 1)
        # with n=1 each fit errs exactly on the atom it did not see, so the
        # median errs at an atom iff at least two samples drew the other one
        def at_least_two(p):
            return 3 * p**2 * (1 - p) + p**3

        expected = F(3, 4) * at_least_two(F(1, 4)) + F(1, 4) * at_least_two(F(3, 4))
        assert value == expected == F(21, 64)


class TestMcEstimator:
    def test_constant_loss_degenerate(self):
        inst = fixed_instance()
        est = mc.mc_expected_loss(ConstantLearner(1), inst, 2, 50, seed=1)
        assert est.mean == 1.0
        assert est.stderr == 0.0
        assert est.ci_lo == est.ci_hi == 1.0

    def test_agrees_with_exact_oracle(self):
        inst = fixed_instance()
        interp = bind(learners.generic_interpolator, inst.cls)
        for learner, n in (
            (learners.SingleInterpolator(interp), 2),
            (learners.MedianOfThree(interp), 1),
            (
                learners.InterpolatorAggregation(
                    interp, learners.DisjointBlocks(2), learners.Mean()
                ),
                3,
            ),
        ):
            exact = mc.exact_expected_loss(learner, inst, n)
            est = mc.mc_expected_loss(learner, inst, n, 400, seed=3)
            tol = max(3 * est.stderr, 1e-12)
            assert abs(est.mean - float(exact)) <= tol

    def test_reproducible_and_thread_independent(self):
        inst = fixed_instance()
        interp = bind(learners.generic_interpolator, inst.cls)
        learner = learners.SingleInterpolator(interp)
        a = mc.mc_expected_loss(learner, inst, 2, 60, seed=5)
        b = mc.mc_expected_loss(learner, inst, 2, 60, seed=5)
        c = mc.mc_expected_loss(learner, inst, 2, 60, seed=5, threads=4)
        assert a.losses == b.losses == c.losses

    def test_family_redraws_support(self):
        fam = adversaries.thm2_family(HALF, 2, F(1, 64), 3)
        interp = bind(learners.generic_interpolator, fam.cls)
        learner = learners.InterpolatorAggregation(
            interp, learners.DisjointBlocks(3), learners.Median()
        )
        est = mc.mc_expected_loss(learner, fam, 1, 200, seed=9)
        # ensemble mixes losses 0 and 1/4, so the variance is positive
        assert est.stderr > 0
        assert set(est.losses) <= {F(0), F(1, 4)}

    def test_minimum_trials(self):
        inst = fixed_instance()
        with pytest.raises(PreconditionError):
            mc.mc_expected_loss(ConstantLearner(0), inst, 1, 10, seed=0)

    def test_ci_coverage_bernoulli(self):
        # synthetic Bernoulli(1/4) losses: 95% CI covers 1/4 in >= 90/100 seeds
        dist = core.FiniteDistribution.from_triples(
            [(NAT(1), 0, F(1, 4)), (NAT(2), 0, F(3, 4))]
        )
        witness = core.TableHypothesis.from_dict({NAT(1): F(0), NAT(2): F(0)})
        inst = adversaries.HardInstance(
            theorem="bern", cls=None, distribution=dist, witness=witness,
            gamma=HALF, epsilon=None, d=None, universe=None, n_max=None,
        )

        class FirstPointLearner:
            # loss 1 exactly when the first draw hits the 1/4-mass atom
            sample_arity = 1

            def predictor(self, samples):
                bad = samples[0][0].point == NAT(1)
                return lambda x: F(1) if bad else F(0)

        covered = 0
        for seed in range(100):
            est = mc.mc_expected_loss(FirstPointLearner(), inst, 1, 200, seed=seed)
            if est.ci_lo <= 0.25 <= est.ci_hi:
                covered += 1
        assert covered >= 90


class TestScalingFit:
    def test_inverse_n_slope(self):
        points = [(n, 3.0 / n) for n in (8, 16, 32, 64, 128)]
        fit = mc.scaling_fit(points)
        assert math.isclose(fit.slope, -1.0, abs_tol=1e-9)
        assert math.isclose(fit.r_squared, 1.0, abs_tol=1e-12)

    def test_inverse_n_squared_slope(self):
        points = [(n, 5.0 / n**2) for n in (8, 16, 32, 64)]
        fit = mc.scaling_fit(points)
        assert math.isclose(fit.slope, -2.0, abs_tol=1e-9)

    def test_zero_losses_rejected(self):
        with pytest.raises(PreconditionError):
            mc.scaling_fit([(8, 0.1), (16, 0.0), (32, 0.01), (64, 0.001)])

    def test_needs_four_points(self):
        with pytest.raises(PreconditionError):
            mc.scaling_fit([(8, 1.0), (16, 0.5), (32, 0.25)])


class TestEnvelope:
    def test_bound_values(self):
        # direct evaluations of 8 (d Ln^2(2 e n / d) + ln(2/delta)) / n
        b64 = mc.interpolator_envelope_bound(2, 64, 0.1)
        assert math.isclose(
            b64, 8 * (2 * math.log(64 * math.e) ** 2 + math.log(20)) / 64
        )
        assert b64 > 1  # vacuous at small n
        b4096 = mc.interpolator_envelope_bound(2, 4096, 0.1)
        assert math.isclose(
            b4096, 8 * (2 * math.log(4096 * math.e) ** 2 + math.log(20)) / 4096
        )
        assert 0.3 < b4096 < 0.4

    def test_all_zero_losses_pass_with_full_margin(self):
        ok, margin = mc.quantile_envelope_check([F(0)] * 20, 0.1, 0.5)
        assert ok and margin == 0.5

    def test_vacuous_bound_clamps_and_passes(self):
        losses = [F(1)] * 20
        ok, margin = mc.quantile_envelope_check(losses, 0.1, 7.0)
        assert ok and margin == 0.0

    def test_quantile_violation_detected(self):
        losses = [F(0)] * 10 + [F(1)] * 10
        ok, _ = mc.quantile_envelope_check(losses, 0.1, 0.5)
        assert not ok

    def test_sample_floor(self):
        with pytest.raises(PreconditionError):
            mc.quantile_envelope_check([F(0)] * 5, 0.1, 0.5)
