"""Randomized cross-checks of the constructive consistency searches.

The structured classes find their colex-first consistent member without
enumerating (zero labels pin the member set or block; a nonzero label inverts
the unique-value rank).  These tests replay random samples against the
brute-force enumeration answer on universes small enough to enumerate.
"""

import random
from fractions import Fraction as F

import pytest

from cutofflab import core, learners, mc, adversaries
from cutofflab import experiments

NAT = core.Point.nat
PAIR = core.Point.pair
HALF = F(1, 2)


def enumeration_first_consistent(cls, sample):
    for h in cls.hypotheses():
        try:
            if all(h.value_at(ex.point) == ex.label for ex in sample):
                return h
        except core.DomainMismatchError:
            continue
    return None


def random_sample(rng, cls, points, max_len=4):
    """Random mix of zeros, class unique values, and junk labels."""
    members = list(cls.hypotheses())
    out = []
    for _ in range(rng.randrange(0, max_len + 1)):
        point = rng.choice(points)
        roll = rng.random()
        if roll < 0.5:
            label = F(0)
        elif roll < 0.85:
            label = rng.choice(members).value
        else:
            label = F(rng.randrange(1, 5), 7)
        out.append(core.LabeledExample(point, label))
    return tuple(out)


@pytest.mark.parametrize(
    "cls,points",
    [
        (core.CantorClass(HALF, 2, 6), [NAT(i) for i in range(1, 7)]),
        (core.CantorClass(F(1, 3), 3, 7), [NAT(i) for i in range(1, 8)]),
        (
            core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 9),
            [PAIR(1, 1)] + [PAIR(4, x) for x in range(1, 5)] + [PAIR(9, x) for x in range(1, 10)],
        ),
        (
            core.SplitCantorClass(F(1, 4), core.D_MINUS_ONE_COMPLEMENT, 3, 7),
            [PAIR(k, x) for k in range(2, 8) for x in range(1, k + 1)],
        ),
    ],
    ids=["cantor26", "cantor37", "split_sqrt9", "split_comp37"],
)
def test_first_consistent_matches_enumeration(cls, points):
    rng = random.Random(99)
    for _ in range(300):
        sample = random_sample(rng, cls, points)
        assert cls.first_consistent(sample) == enumeration_first_consistent(cls, sample)


def test_unique_value_inversion_round_trip_large_blocks():
    # value -> (block, members) recovery must work even for the huge blocks
    # the ensembles use, where enumeration is impossible
    cls = core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 784)
    rng = random.Random(5)
    for _ in range(20):
        block = rng.choice([1, 4, 9, 729, 784])
        m = cls.member_size(block)
        members = tuple(sorted(rng.sample(range(1, block + 1), m)))
        h = cls.hypothesis(block, members)
        recovered = cls._from_value(h.value)
        assert recovered == h

    comp = core.SplitCantorClass(HALF, core.D_MINUS_ONE_COMPLEMENT, 4, 64)
    for _ in range(20):
        block = rng.randrange(3, 65)
        members = tuple(sorted(rng.sample(range(1, block + 1), 3)))
        h = comp.hypothesis(block, members)
        assert comp._from_value(h.value) == h


def test_large_universe_fit_is_colex_minimal_superset():
    cls = core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 784)
    sample = core.training_sequence(
        [(PAIR(784, 300), 0), (PAIR(784, 7), 0), (PAIR(784, 501), 0)]
    )
    h = learners.generic_interpolator(cls, sample)
    assert h.k == 784
    # fill = 25 smallest indices not already observed
    fill = []
    x = 1
    while len(fill) < 28 - 3:
        if x not in (300, 7, 501):
            fill.append(x)
        x += 1
    assert h.members == frozenset({300, 7, 501, *fill})
    assert core.empirical_cutoff_loss(h.value_at, sample, F(0)) == 0


def test_nonzero_label_pins_unique_hypothesis_large_universe():
    cls = core.SplitCantorClass(HALF, core.D_MINUS_ONE_COMPLEMENT, 4, 64)
    target = cls.hypothesis(64, {10, 20, 30})
    sample = core.training_sequence(
        [(PAIR(64, 10), target.value), (PAIR(64, 1), 0)]
    )
    assert cls.first_consistent(sample) == target
    # contradicting the pinned hypothesis yields no match
    bad = core.training_sequence(
        [(PAIR(64, 10), target.value), (PAIR(64, 20), 0)]
    )
    assert cls.first_consistent(bad) is None


def test_reproduce_reports_identical_across_thread_counts():
    for threads in (1, 2, 4):
        rep = experiments.run_thm2(
            gamma=HALF, d=2, epsilon=F(1, 64), m_bound=3, trials=120, seed=21,
            threads=threads,
        )
        rows = [r.as_csv() for r in rep.rows]
        if threads == 1:
            baseline = rows
        else:
            assert rows == baseline


def test_mc_family_thread_identity_thm5():
    fam = adversaries.thm5_family(HALF, 4, F(1, 256))
    learner = learners.ProperERM(fam.cls, HALF)
    seq = mc.mc_expected_loss(learner, fam, 5, 60, seed=8)
    par = mc.mc_expected_loss(learner, fam, 5, 60, seed=8, threads=3)
    assert seq.losses == par.losses
