"""Exact enumeration oracles, seeded Monte Carlo estimation, scaling fits.

Per-trial losses are exact rationals; only the aggregate mean / CI convert to
floating point, which keeps Monte Carlo error cleanly separated from
arithmetic error.  Trials are stream-indexed off the master seed, so results
are identical under any execution order or worker count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import core
from .adversaries import HardInstance, InstanceFamily
from .errors import BudgetExceededError, PreconditionError

DEFAULT_ORACLE_BUDGET = 100_000


@dataclass(frozen=True)
class LossEstimate:
    mean: float
    stderr: float
    ci_lo: float
    ci_hi: float
    trials: int
    exact: Optional[Fraction] = None
    losses: tuple[Fraction, ...] = ()

    @property
    def ci_halfwidth(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2

    def exceed_fraction(self, threshold) -> Fraction:
        """Share of per-trial losses strictly above the threshold."""
        threshold = Fraction(threshold)
        if not self.losses:
            raise PreconditionError("estimate was built without per-trial losses")
        return Fraction(sum(1 for l in self.losses if l > threshold), len(self.losses))


@dataclass(frozen=True)
class ScalingFit:
    points: tuple[tuple[int, float], ...]
    slope: float
    intercept: float
    r_squared: float


def exact_loss_distribution(
    learner, instance: HardInstance, n: int, budget: int = DEFAULT_ORACLE_BUDGET
) -> list[tuple[Fraction, Fraction]]:
    """(probability, loss) pairs over every weighted sample tuple.

    Enumerates support^(n * arity) sequences, so the learner must be
    deterministic given its samples; a three-sample learner enumerates the
    triple product.
    """
    dist = instance.distribution
    arity = learner.sample_arity
    total_len = n * arity
    if dist.support_size() ** total_len > budget:
        raise BudgetExceededError(
            f"oracle would enumerate {dist.support_size()}^{total_len} sequences"
        )
    out = []
    for combo in itertools.product(dist.atoms, repeat=total_len):
        weight = math.prod((a.mass for a in combo), start=core.ONE)
        if weight == core.ZERO:
            continue
        samples = tuple(
            tuple(core.LabeledExample(a.point, a.label) for a in combo[j * n : (j + 1) * n])
            for j in range(arity)
        )
        predictor = learner.predictor(samples)
        out.append((weight, core.cutoff_loss(predictor, dist, instance.gamma)))
    return out


def exact_expected_loss(
    learner, instance: HardInstance, n: int, budget: int = DEFAULT_ORACLE_BUDGET
) -> Fraction:
    """Exact E[loss] by weighted enumeration of all sample sequences."""
    pairs = exact_loss_distribution(learner, instance, n, budget)
    return sum((w * l for w, l in pairs), core.ZERO)


def exact_exceed_probability(
    learner, instance: HardInstance, n: int, threshold, budget: int = DEFAULT_ORACLE_BUDGET
) -> Fraction:
    threshold = Fraction(threshold)
    pairs = exact_loss_distribution(learner, instance, n, budget)
    return sum((w for w, l in pairs if l > threshold), core.ZERO)


def _trial_loss(learner, source, n: int, seed: int, trial: int) -> Fraction:
    base = core.stream_seed(seed, trial)
    if isinstance(source, InstanceFamily):
        rng = core.rng_for(base, 0)
        instance, _ = source.draw_instance(rng)
    else:
        instance = source
    samples = tuple(
        core.sample_iid(instance.distribution, n, base, stream=j + 1)
        for j in range(learner.sample_arity)
    )
    predictor = learner.predictor(samples)
    return core.cutoff_loss(predictor, instance.distribution, instance.gamma)


def mc_expected_loss(
    learner,
    source,
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> LossEstimate:
    """Monte Carlo mean of exact per-trial cutoff losses with a normal 95% CI.

    `source` is a fixed HardInstance or an InstanceFamily; families redraw
    their support vector each trial (stream-separated), estimating the
    support-averaged loss the constructions bound.
    """
    if trials < 30:
        raise PreconditionError("need at least 30 trials for the normal CI")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            losses = tuple(
                pool.map(lambda t: _trial_loss(learner, source, n, seed, t), range(trials))
            )
    else:
        losses = tuple(_trial_loss(learner, source, n, seed, t) for t in range(trials))
    exact_mean = sum(losses, core.ZERO) / trials
    mean = float(exact_mean)
    var = sum((float(l) - mean) ** 2 for l in losses) / (trials - 1)
    stderr = math.sqrt(var / trials)
    half = 1.96 * stderr
    return LossEstimate(
        mean=mean,
        stderr=stderr,
        ci_lo=mean - half,
        ci_hi=mean + half,
        trials=trials,
        losses=losses,
    )


def scaling_fit(points: Sequence[tuple[int, float]]) -> ScalingFit:
    """Least squares on (ln n, ln mean-loss); the slope is the decay exponent."""
    points = tuple((int(n), float(loss)) for n, loss in points)
    if len(points) < 4:
        raise PreconditionError("scaling fit needs at least 4 points")
    if any(loss <= 0 for _, loss in points):
        raise PreconditionError(
            "scaling fit needs strictly positive losses (try more trials or smaller n)"
        )
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(loss) for _, loss in points]
    x_bar = sum(xs) / len(xs)
    y_bar = sum(ys) / len(ys)
    sxx = sum((x - x_bar) ** 2 for x in xs)
    sxy = sum((x - x_bar) * (y - y_bar) for x, y in zip(xs, ys))
    syy = sum((y - y_bar) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = y_bar - slope * x_bar
    r_squared = 1.0 if syy == 0 else (sxy * sxy) / (sxx * syy)
    return ScalingFit(points, slope, intercept, r_squared)


def interpolator_envelope_bound(d: int, n: int, delta: float) -> float:
    """8 (d Ln^2(2 e n / d) + ln(2/delta)) / n with Ln(x) = max(2, ln x)."""
    if d < 1 or n < 1 or not 0 < delta < 1:
        raise PreconditionError("bound needs d >= 1, n >= 1, 0 < delta < 1")
    ln_term = max(2.0, math.log(2 * math.e * n / d))
    return 8.0 * (d * ln_term**2 + math.log(2 / delta)) / n


def quantile_envelope_check(losses, delta: float, bound: float) -> tuple[bool, float]:
    """Empirical (1-delta)-quantile against the bound (clamped at 1).

    Returns (passed, margin).  The quantile is the ceil((1-delta) T)-th order
    statistic.  Bounds above 1 are vacuous and always pass.
    """
    losses = sorted(Fraction(l) for l in losses)
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    if len(losses) < 1 / delta:
        raise PreconditionError(f"need at least {math.ceil(1/delta)} samples")
    idx = math.ceil((1 - delta) * len(losses)) - 1
    quantile = float(losses[idx])
    effective = min(bound, 1.0)
    return quantile <= effective, effective - quantile
