"""Hard-instance constructions for the lower-bound checks.

Each builder packages a hypothesis class, a realizable distribution (or a
seeded generator over support vectors, when the construction averages over a
random support), the realizability witness, and the sample-size ceiling the
corresponding bound is stated at.  Universe sizes are re-verified by exact
rational inequalities at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import core, dims
from .errors import PreconditionError

#: Distribution constant for the finite-aggregation construction: the heavy
#: index carries 1 - DIST_CONSTANT*eps and the rest split DIST_CONSTANT*eps.
DIST_CONSTANT = 16
#: Sample-size denominator for the same construction: n_max = d / (SAMPLE_DENOM*eps).
SAMPLE_DENOM = 128


@dataclass(frozen=True)
class SupportVector:
    """Distinct support indices; ``pinned_first`` marks constructions whose
    first entry is the fixed heavy index."""

    entries: tuple[int, ...]
    pinned_first: bool = False

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise PreconditionError("support vector entries must be distinct")

    def __len__(self):
        return len(self.entries)


#: Masses over 1-based indices into a support vector.
IndexDistribution = tuple[Fraction, ...]


@dataclass(frozen=True)
class HardInstance:
    theorem: str
    cls: object
    distribution: core.FiniteDistribution
    witness: core.Hypothesis
    gamma: Fraction
    epsilon: Optional[Fraction]
    d: Optional[int]
    universe: Optional[int]
    n_max: Optional[int]
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceFamily:
    """Seeded generator over hard instances indexed by a random support vector."""

    theorem: str
    cls: object
    gamma: Fraction
    epsilon: Optional[Fraction]
    d: Optional[int]
    universe: int
    n_max: Optional[int]
    index_masses: IndexDistribution
    pinned_first: bool
    params: dict = field(default_factory=dict)

    def draw_support(self, rng) -> SupportVector:
        raise NotImplementedError

    def instance_for(self, support: SupportVector) -> HardInstance:
        raise NotImplementedError

    def draw_instance(self, rng) -> tuple[HardInstance, SupportVector]:
        support = self.draw_support(rng)
        return self.instance_for(support), support


def uniform_index_masses(count: int) -> IndexDistribution:
    return tuple(Fraction(1, count) for _ in range(count))


def pinned_index_masses(d: int, epsilon: Fraction) -> IndexDistribution:
    """Index 1 heavy with 1 - 16 eps, the other d-1 indices share 16 eps."""
    epsilon = Fraction(epsilon)
    heavy = core.ONE - DIST_CONSTANT * epsilon
    light = DIST_CONSTANT * epsilon / (d - 1)
    return (heavy,) + (light,) * (d - 1)


# ---------------------------------------------------------------------------
# Proper-rule aggregation lower bound (works for any class)
# ---------------------------------------------------------------------------


def two_tier_distribution(witness, points, light_mass: Fraction) -> core.FiniteDistribution:
    """Heavy mass on the first point, `light_mass` on each of the rest, all
    labeled by the witness."""
    points = tuple(points)
    light_mass = Fraction(light_mass)
    heavy = core.ONE - light_mass * (len(points) - 1)
    if heavy < core.ZERO:
        raise PreconditionError("light masses exceed the total")
    masses = (heavy,) + (light_mass,) * (len(points) - 1)
    return core.FiniteDistribution.from_triples(
        [(x, witness.value_at(x), m) for x, m in zip(points, masses)], witness
    )


def thm1_instance(
    cls, gamma: Fraction, epsilon: Fraction, pool=None, cap_d: int = dims.DEFAULT_POINT_CAP
) -> tuple[HardInstance, dims.ShatterCertificate]:
    """Shattered set + witness + the 1-4eps / 4eps/(d-1) two-tier distribution.

    The worst-case interpolator for the instance is
    ``adversarial_interpolator`` applied to the returned certificate.
    """
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    if not core.ZERO < epsilon < Fraction(1, 4):
        raise PreconditionError("need 0 < epsilon < 1/4")
    pool = tuple(pool) if pool is not None else cls.default_pool()
    d = dims.gamma_graph_dimension(cls, pool, gamma, cap_d)
    if d < 2:
        raise PreconditionError(f"graph dimension must be >= 2, found {d}")
    cert = dims.find_shattered_set(cls, pool, gamma, d)
    light = 4 * epsilon / (d - 1)
    distribution = two_tier_distribution(cert.witness, cert.points, light)
    n_max = math.floor(d / (32 * epsilon))
    instance = HardInstance(
        theorem="thm1",
        cls=cls,
        distribution=distribution,
        witness=cert.witness,
        gamma=gamma,
        epsilon=epsilon,
        d=d,
        universe=None,
        n_max=n_max,
        params={"heavy_mass": core.ONE - 4 * epsilon, "light_mass": light},
    )
    return instance, cert


# ---------------------------------------------------------------------------
# Finite-aggregation lower bound over the Cantor class
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Thm2Family(InstanceFamily):
    def draw_support(self, rng) -> SupportVector:
        rest = core.sample_without_replacement(rng, list(range(2, self.universe + 1)), self.d - 1)
        return SupportVector((1, *rest), pinned_first=True)

    def instance_for(self, support: SupportVector) -> HardInstance:
        witness = self.cls.hypothesis(support.entries)
        atoms = [
            (core.Point.nat(a), core.ZERO, mass)
            for a, mass in zip(support.entries, self.index_masses)
        ]
        distribution = core.FiniteDistribution.from_triples(atoms, witness)
        return HardInstance(
            theorem=self.theorem,
            cls=self.cls,
            distribution=distribution,
            witness=witness,
            gamma=self.gamma,
            epsilon=self.epsilon,
            d=self.d,
            universe=self.universe,
            n_max=self.n_max,
            params=dict(self.params, support=support.entries),
        )


def thm2_family(gamma: Fraction, d: int, epsilon: Fraction, m_bound: int) -> Thm2Family:
    """Cantor-class family: universe ceil(2 d m_bound + d/4 + 1), all labels 0,
    heavy index pinned to 1; n_max = floor(d / (128 eps))."""
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    if d < 2:
        raise PreconditionError("need d >= 2")
    if not core.ZERO < epsilon < Fraction(1, 32):
        raise PreconditionError("need 0 < epsilon < 1/32")
    if m_bound < 1:
        raise PreconditionError("need m_bound >= 1")
    universe = math.ceil(2 * d * m_bound + Fraction(d, 4) + 1)
    n_max = math.floor(Fraction(d) / (SAMPLE_DENOM * epsilon))
    cls = core.CantorClass(gamma, d, universe)
    return Thm2Family(
        theorem="thm2",
        cls=cls,
        gamma=gamma,
        epsilon=epsilon,
        d=d,
        universe=universe,
        n_max=n_max,
        index_masses=pinned_index_masses(d, epsilon),
        pinned_first=True,
        params={"m_bound": m_bound},
    )


# ---------------------------------------------------------------------------
# Unlearnable-by-finite-aggregation construction (sqrt-size split class)
# ---------------------------------------------------------------------------


def thm3_universe_condition(i: int, n_prime: int, m_bound: int, epsilon: Fraction) -> bool:
    """(1 - n'/i)(1 - m/i) >= 1 - eps/2, exactly, for universe i*i."""
    epsilon = Fraction(epsilon)
    if i <= n_prime or i <= m_bound:
        return False
    lhs = (core.ONE - Fraction(n_prime, i)) * (core.ONE - Fraction(m_bound, i))
    return lhs >= core.ONE - epsilon / 2


def thm3_universe_size(n_prime: int, m_bound: int, epsilon: Fraction) -> int:
    """Smallest perfect square i*i satisfying the universe condition, scanning
    i upward from n' + 1."""
    i = n_prime + 1
    while not thm3_universe_condition(i, n_prime, m_bound, epsilon):
        i += 1
    return i * i


@dataclass(frozen=True)
class Thm3Family(InstanceFamily):
    def draw_support(self, rng) -> SupportVector:
        root = math.isqrt(self.universe)
        entries = core.sample_without_replacement(rng, list(range(1, self.universe + 1)), root)
        return SupportVector(tuple(entries))

    def instance_for(self, support: SupportVector) -> HardInstance:
        witness = self.cls.hypothesis(self.universe, support.entries)
        atoms = [
            (core.Point.pair(self.universe, a), core.ZERO, mass)
            for a, mass in zip(support.entries, self.index_masses)
        ]
        distribution = core.FiniteDistribution.from_triples(atoms, witness)
        return HardInstance(
            theorem=self.theorem,
            cls=self.cls,
            distribution=distribution,
            witness=witness,
            gamma=self.gamma,
            epsilon=self.epsilon,
            d=None,
            universe=self.universe,
            n_max=self.n_max,
            params=dict(self.params, support=support.entries),
        )


def thm3_family(
    gamma: Fraction,
    epsilon: Fraction,
    n_prime: int,
    m_bound: int,
    universe: Optional[int] = None,
) -> Thm3Family:
    """Sqrt-size split-class family with uniform mass on a random sqrt(k_u)-set.

    `universe` overrides the ascending-scan choice; it must still be a perfect
    square satisfying the exact universe condition.
    """
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    if not core.ZERO < epsilon < core.ONE:
        raise PreconditionError("need 0 < epsilon < 1")
    if n_prime < 1 or m_bound < 1:
        raise PreconditionError("need n' >= 1 and m_bound >= 1")
    if universe is None or universe <= 0:
        universe = thm3_universe_size(n_prime, m_bound, epsilon)
    root = math.isqrt(universe)
    if root * root != universe or not thm3_universe_condition(root, n_prime, m_bound, epsilon):
        raise PreconditionError(
            f"universe {universe} violates the size condition: need a perfect square"
            f" k with (1 - {n_prime}/sqrt(k)) * (1 - {m_bound}/sqrt(k)) >= 1 - {epsilon}/2"
        )
    cls = core.SplitCantorClass(gamma, core.SQRT_SIZE, None, universe)
    return Thm3Family(
        theorem="thm3",
        cls=cls,
        gamma=gamma,
        epsilon=epsilon,
        d=None,
        universe=universe,
        n_max=n_prime,
        index_masses=uniform_index_masses(root),
        pinned_first=False,
        params={"m_bound": m_bound, "n_prime": n_prime},
    )


# ---------------------------------------------------------------------------
# Proper-learner lower bound (complement split class)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Thm5Family(InstanceFamily):
    def draw_support(self, rng) -> SupportVector:
        entries = core.sample_without_replacement(
            rng, list(range(1, self.universe + 1)), self.universe - self.d + 1
        )
        return SupportVector(tuple(entries))

    def instance_for(self, support: SupportVector) -> HardInstance:
        complement = [x for x in range(1, self.universe + 1) if x not in set(support.entries)]
        witness = self.cls.hypothesis(self.universe, complement)
        atoms = [
            (core.Point.pair(self.universe, a), core.ZERO, mass)
            for a, mass in zip(support.entries, self.index_masses)
        ]
        distribution = core.FiniteDistribution.from_triples(atoms, witness)
        return HardInstance(
            theorem=self.theorem,
            cls=self.cls,
            distribution=distribution,
            witness=witness,
            gamma=self.gamma,
            epsilon=self.epsilon,
            d=self.d,
            universe=self.universe,
            n_max=self.n_max,
            params=dict(self.params, support=support.entries),
        )


def thm5_family(gamma: Fraction, d: int, epsilon: Fraction) -> Thm5Family:
    """Complement split-class family: k_u = ceil(d/(16 eps)), uniform mass
    1/(k_u - d + 1) on a random support, witness zero on all of it;
    n_max = floor((d/(32 eps)) ln(1/(64 e eps)))."""
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    if d < 2:
        raise PreconditionError("need d >= 2")
    if not (core.ZERO < epsilon and float(epsilon) < 1 / (64 * math.e)):
        raise PreconditionError("need 0 < epsilon < 1/(64 e)")
    universe = math.ceil(Fraction(d) / (16 * epsilon))
    if universe <= 2 * d + 1:  # guaranteed by the epsilon range; re-verified
        raise PreconditionError("universe must exceed 2d + 1")
    support_size = universe - d + 1
    # transcendental ceiling: evaluated in double precision (documented)
    n_max = math.floor((d / (32 * float(epsilon))) * math.log(1 / (64 * math.e * float(epsilon))))
    cls = core.SplitCantorClass(gamma, core.D_MINUS_ONE_COMPLEMENT, d, universe)
    return Thm5Family(
        theorem="thm5",
        cls=cls,
        gamma=gamma,
        epsilon=epsilon,
        d=d,
        universe=universe,
        n_max=n_max,
        index_masses=uniform_index_masses(support_size),
        pinned_first=False,
        params={"support_size": support_size},
    )


# ---------------------------------------------------------------------------
# Support-vector coupling
# ---------------------------------------------------------------------------


#: A drawn index sequence: 1-based positions into a SupportVector.
IndexSequence = tuple[int, ...]


def draw_index_sequence(
    index_masses: IndexDistribution, n: int, seed: int, stream: int = 0
) -> IndexSequence:
    """n i.i.d. 1-based indices from the index distribution, seed-determined."""
    index_atoms = [
        (core.Point.nat(i + 1), core.ZERO, mass) for i, mass in enumerate(index_masses)
    ]
    index_dist = core.FiniteDistribution.from_triples(index_atoms)
    return tuple(ex.point.n for ex in core.sample_iid(index_dist, n, seed, stream))


def coupled_sample(
    support: SupportVector,
    index_masses: IndexDistribution,
    n: int,
    seed: int,
    stream: int = 0,
    block: Optional[int] = None,
) -> core.TrainingSequence:
    """Sample as (A_t, 0) pairs with t i.i.d. from the index distribution.

    With `block` set, points are (block, A_t) pair points; otherwise nat
    points.  The induced law equals i.i.d. sampling from the instance
    distribution because the support entries are distinct.
    """
    if len(index_masses) != len(support.entries):
        raise PreconditionError("index distribution length must match the support")
    indices = draw_index_sequence(index_masses, n, seed, stream)
    out = []
    for t in indices:
        value = support.entries[t - 1]
        point = core.Point.nat(value) if block is None else core.Point.pair(block, value)
        out.append(core.LabeledExample(point, core.ZERO))
    return tuple(out)


def missing_indices(support: SupportVector, sample: core.TrainingSequence) -> set[int]:
    """1-based indices of support entries absent from the sample's points,
    skipping the pinned heavy index when the construction has one."""
    seen = set()
    for ex in sample:
        seen.add(ex.point.coords[-1])
    start = 2 if support.pinned_first else 1
    return {
        i
        for i in range(start, len(support.entries) + 1)
        if support.entries[i - 1] not in seen
    }
