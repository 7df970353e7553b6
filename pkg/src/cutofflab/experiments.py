"""Desk-scale checks of every quantitative threshold, one per reproduce tag.

Each check returns a Report holding its config echo, result rows (the CSV
schema), and named verdicts.  Defaults are the ones the acceptance suite runs;
all of them finish in minutes on a laptop and are deterministic per seed.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from . import adversaries, core, learners, mc
from . import partial as partial_concepts
from .errors import PreconditionError

__version__ = "0.1.0"

TAGS = ("thm1", "thm2", "thm3", "thm4", "thm5", "lemma-interp", "lemma-disamb")

CSV_HEADER = (
    "experiment",
    "theorem_tag",
    "gamma",
    "epsilon",
    "d",
    "n",
    "trials",
    "mean",
    "ci_lo",
    "ci_hi",
    "threshold",
    "pass",
)


@dataclass(frozen=True)
class Row:
    experiment: str
    theorem_tag: str
    gamma: str
    epsilon: str
    d: str
    n: str
    trials: str
    mean: str
    ci_lo: str
    ci_hi: str
    threshold: str
    passed: bool

    def as_csv(self) -> list[str]:
        return [
            self.experiment,
            self.theorem_tag,
            self.gamma,
            self.epsilon,
            self.d,
            self.n,
            self.trials,
            self.mean,
            self.ci_lo,
            self.ci_hi,
            self.threshold,
            "pass" if self.passed else "fail",
        ]


@dataclass
class Report:
    tag: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    verdicts: list[tuple[str, bool, str]] = field(default_factory=list)
    wall_clock_s: float = 0.0
    version: str = __version__
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.verdicts)

    def verdict(self, name: str, ok: bool, detail: str):
        self.verdicts.append((name, bool(ok), detail))

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "config": self.config,
            "rows": [dict(zip(CSV_HEADER, r.as_csv())) for r in self.rows],
            "verdicts": [
                {"name": n, "pass": ok, "detail": d} for n, ok, d in self.verdicts
            ],
            "wall_clock_s": self.wall_clock_s,
            "version": self.version,
            "seed": self.seed,
        }


def _row(tag, *, gamma="", epsilon="", d="", n="", trials="", mean="", ci=(None, None),
         threshold="", passed=True, experiment=None):
    lo, hi = ci
    return Row(
        experiment=experiment or tag,
        theorem_tag=tag,
        gamma=str(gamma),
        epsilon=str(epsilon),
        d=str(d),
        n=str(n),
        trials=str(trials),
        mean=str(mean),
        ci_lo="" if lo is None else f"{lo:.6g}",
        ci_hi="" if hi is None else f"{hi:.6g}",
        threshold=str(threshold),
        passed=passed,
    )


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.wall_clock_s = round(time.perf_counter() - start, 3)
        return report

    return wrapper


# ---------------------------------------------------------------------------
# thm1: proper-rule aggregation of a worst-case interpolator, exact oracle
# ---------------------------------------------------------------------------


@_timed
def run_thm1(gamma=Fraction(1, 2), d=2, universe=5, epsilon=Fraction(1, 32), seed=0) -> Report:
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    report = Report(
        "thm1",
        {
            "gamma": str(gamma),
            "d": d,
            "universe": universe,
            "epsilon": str(epsilon),
            "seed": seed,
        },
        seed=seed,
    )
    cls = core.CantorClass(gamma, d, universe)
    instance, cert = adversaries.thm1_instance(cls, gamma, epsilon)
    n = instance.n_max
    adversary = partial(learners.adversarial_interpolator, cert)
    rules = {
        "min": learners.OrderStatistic(1),
        "max": learners.OrderStatistic(3),
        "median3": learners.Median(),
    }
    for name, rule in rules.items():
        learner = learners.InterpolatorAggregation(
            adversary, learners.DisjointBlocks(3), rule
        )
        expected = mc.exact_expected_loss(learner, instance, n)
        exceed = mc.exact_exceed_probability(learner, instance, n, 2 * epsilon)
        ok_mean = expected > epsilon
        ok_prob = exceed >= Fraction(1, 2)
        report.verdict(
            f"exact_mean_{name}", ok_mean, f"E[loss]={expected} > eps={epsilon}"
        )
        report.verdict(
            f"exceed_prob_{name}", ok_prob, f"P[loss>2eps]={exceed} >= 1/2"
        )
        report.rows.append(
            _row(
                "thm1",
                experiment=f"thm1_{name}",
                gamma=gamma,
                epsilon=epsilon,
                d=instance.d,
                n=n,
                trials="exact",
                mean=expected,
                threshold=f">{epsilon}",
                passed=ok_mean and ok_prob,
            )
        )
    return report


# ---------------------------------------------------------------------------
# thm2: interpolating finite aggregation on the Cantor class ensemble
# ---------------------------------------------------------------------------


@_timed
def run_thm2(
    gamma=Fraction(1, 2),
    d=2,
    epsilon=Fraction(1, 64),
    m_bound=3,
    trials=4000,
    seed=0,
    threads=1,
) -> Report:
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    family = adversaries.thm2_family(gamma, d, epsilon, m_bound)
    n = family.n_max
    report = Report(
        "thm2",
        {
            "gamma": str(gamma),
            "d": d,
            "epsilon": str(epsilon),
            "m_bound": m_bound,
            "universe": family.universe,
            "n": n,
            "trials": trials,
            "seed": seed,
        },
        seed=seed,
    )
    interp = partial(learners.generic_interpolator, family.cls)
    learner = learners.InterpolatorAggregation(
        interp, learners.DisjointBlocks(m_bound), learners.Median()
    )
    est = mc.mc_expected_loss(learner, family, n, trials, seed, threads=threads)
    mean_floor = float(2 * epsilon) - est.ci_halfwidth
    freq = est.exceed_fraction(epsilon)
    freq_floor = Fraction(1, 16) - Fraction(1, 50)
    report.verdict(
        "mean_above", est.mean > mean_floor, f"mean={est.mean:.5f} > 2eps-CI={mean_floor:.5f}"
    )
    report.verdict(
        "exceed_freq", freq >= freq_floor, f"freq(loss>eps)={float(freq):.4f} >= {float(freq_floor):.4f}"
    )
    report.rows.append(
        _row(
            "thm2",
            gamma=gamma,
            epsilon=epsilon,
            d=d,
            n=n,
            trials=trials,
            mean=f"{est.mean:.6g}",
            ci=(est.ci_lo, est.ci_hi),
            threshold=f">{float(2 * epsilon):.6g}-CI",
            passed=report.passed,
        )
    )
    return report


# ---------------------------------------------------------------------------
# thm3: sqrt-size split class, no finite interpolating aggregation learns it
# ---------------------------------------------------------------------------


@_timed
def run_thm3(
    gamma=Fraction(1, 2),
    epsilon=Fraction(1, 2),
    n_prime=4,
    m_bound=3,
    universe=784,
    trials=1000,
    seed=0,
    threads=1,
) -> Report:
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    family = adversaries.thm3_family(gamma, epsilon, n_prime, m_bound, universe=universe)
    n = n_prime
    report = Report(
        "thm3",
        {
            "gamma": str(gamma),
            "epsilon": str(epsilon),
            "n_prime": n_prime,
            "m_bound": m_bound,
            "universe": family.universe,
            "trials": trials,
            "seed": seed,
        },
        seed=seed,
    )
    interp = partial(learners.generic_interpolator, family.cls)
    learner = learners.InterpolatorAggregation(
        interp, learners.DisjointBlocks(m_bound), learners.Median()
    )
    est = mc.mc_expected_loss(learner, family, n, trials, seed, threads=threads)
    floor = float(core.ONE - epsilon / 2) - est.ci_halfwidth
    report.verdict("mean_above", est.mean >= floor, f"mean={est.mean:.5f} >= {floor:.5f}")
    report.rows.append(
        _row(
            "thm3",
            gamma=gamma,
            epsilon=epsilon,
            n=n,
            trials=trials,
            mean=f"{est.mean:.6g}",
            ci=(est.ci_lo, est.ci_hi),
            threshold=f">={float(core.ONE - epsilon/2):.6g}-CI",
            passed=report.passed,
        )
    )
    return report


# ---------------------------------------------------------------------------
# thm4: median-of-three rate on two-tier instances matched to each n
# ---------------------------------------------------------------------------


def thm4_instance_at(cls, witness, points, n: int, light_scale=Fraction(1)) -> adversaries.HardInstance:
    """Two-tier distribution with light mass light_scale/n per light point."""
    dist = adversaries.two_tier_distribution(witness, points, Fraction(light_scale) / n)
    return adversaries.HardInstance(
        theorem="thm4",
        cls=cls,
        distribution=dist,
        witness=witness,
        gamma=cls.gamma,
        epsilon=None,
        d=len(points),
        universe=cls.universe,
        n_max=None,
    )


@_timed
def run_thm4(
    gamma=Fraction(1, 2),
    d=4,
    universe=12,
    ns=(32, 64, 128, 256, 512, 1024),
    trials=2000,
    seed=0,
    threads=1,
    slope_range=(-1.3, -0.8),
    min_r_squared=0.9,
) -> Report:
    gamma = Fraction(gamma)
    report = Report(
        "thm4",
        {
            "gamma": str(gamma),
            "d": d,
            "universe": universe,
            "ns": list(ns),
            "trials": trials,
            "seed": seed,
        },
        seed=seed,
    )
    cls = core.CantorClass(gamma, d, universe)
    # colex-last shattered set: the canonical interpolator's fill never lands
    # on it, so unseen support points stay gamma-far.
    members = tuple(range(universe - d + 1, universe + 1))
    witness = cls.hypothesis(members)
    points = tuple(core.Point.nat(i) for i in members)
    interp = partial(learners.generic_interpolator, cls)
    med = learners.MedianOfThree(interp)
    curve = []
    for i, n in enumerate(ns):
        instance = thm4_instance_at(cls, witness, points, n)
        est = mc.mc_expected_loss(med, instance, n, trials, core.stream_seed(seed, i), threads=threads)
        curve.append((n, est.mean))
        report.rows.append(
            _row(
                "thm4",
                experiment="thm4_median3",
                gamma=gamma,
                d=d,
                n=n,
                trials=trials,
                mean=f"{est.mean:.6g}",
                ci=(est.ci_lo, est.ci_hi),
                threshold="slope in [-1.3,-0.8]",
                passed=True,
            )
        )
    fit = mc.scaling_fit(curve)
    top_n = ns[-1]
    single = mc.mc_expected_loss(
        learners.SingleInterpolator(interp),
        thm4_instance_at(cls, witness, points, top_n),
        top_n,
        trials,
        core.stream_seed(seed, len(ns)),
        threads=threads,
    )
    lo, hi = slope_range
    report.verdict("slope", lo <= fit.slope <= hi, f"slope={fit.slope:.4f} in [{lo},{hi}]")
    report.verdict(
        "r_squared", fit.r_squared >= min_r_squared, f"r2={fit.r_squared:.5f} >= {min_r_squared}"
    )
    report.verdict(
        "median_below_single",
        curve[-1][1] < single.mean,
        f"median@{top_n}={curve[-1][1]:.6g} < single@{top_n}={single.mean:.6g}",
    )
    report.config["slope"] = fit.slope
    report.config["r_squared"] = fit.r_squared
    return report


# ---------------------------------------------------------------------------
# thm5: proper ERM on the complement split class ensemble
# ---------------------------------------------------------------------------


@_timed
def run_thm5(
    gamma=Fraction(1, 2),
    d=4,
    epsilon=Fraction(1, 256),
    trials=4000,
    seed=0,
    threads=1,
) -> Report:
    gamma, epsilon = Fraction(gamma), Fraction(epsilon)
    family = adversaries.thm5_family(gamma, d, epsilon)
    n = family.n_max
    report = Report(
        "thm5",
        {
            "gamma": str(gamma),
            "d": d,
            "epsilon": str(epsilon),
            "universe": family.universe,
            "n": n,
            "trials": trials,
            "seed": seed,
        },
        seed=seed,
    )
    learner = learners.ProperERM(family.cls, gamma)
    est = mc.mc_expected_loss(learner, family, n, trials, seed, threads=threads)
    mean_floor = float(4 * epsilon / 3) - est.ci_halfwidth
    freq = est.exceed_fraction(epsilon)
    freq_floor = Fraction(1, 48) - Fraction(1, 100)
    report.verdict(
        "mean_above", est.mean >= mean_floor, f"mean={est.mean:.5f} >= 4eps/3-CI={mean_floor:.5f}"
    )
    report.verdict(
        "exceed_freq",
        freq >= freq_floor,
        f"freq(loss>eps)={float(freq):.4f} >= {float(freq_floor):.4f}",
    )
    report.rows.append(
        _row(
            "thm5",
            gamma=gamma,
            epsilon=epsilon,
            d=d,
            n=n,
            trials=trials,
            mean=f"{est.mean:.6g}",
            ci=(est.ci_lo, est.ci_hi),
            threshold=f">={float(4 * epsilon / 3):.6g}-CI",
            passed=report.passed,
        )
    )
    return report


# ---------------------------------------------------------------------------
# lemma-interp: high-probability envelope for a single interpolator
# ---------------------------------------------------------------------------


@_timed
def run_lemma_interp(
    gamma=Fraction(1, 2),
    d=2,
    universe=6,
    n=4096,
    delta=0.1,
    trials=400,
    seed=0,
    threads=1,
) -> Report:
    gamma = Fraction(gamma)
    report = Report(
        "lemma-interp",
        {
            "gamma": str(gamma),
            "d": d,
            "universe": universe,
            "n": n,
            "delta": delta,
            "trials": trials,
            "seed": seed,
        },
        seed=seed,
    )
    cls = core.CantorClass(gamma, d, universe)
    members = tuple(range(universe - d + 1, universe + 1))
    witness = cls.hypothesis(members)
    points = tuple(core.Point.nat(i) for i in members)
    instance = thm4_instance_at(cls, witness, points, n)
    interp = partial(learners.generic_interpolator, cls)
    est = mc.mc_expected_loss(
        learners.SingleInterpolator(interp), instance, n, trials, seed, threads=threads
    )
    bound = mc.interpolator_envelope_bound(d, n, delta)
    ok, margin = mc.quantile_envelope_check(est.losses, delta, bound)
    report.verdict(
        "quantile_below_bound",
        ok,
        f"(1-delta)-quantile within bound={bound:.4f} (margin {margin:.4f})",
    )
    report.rows.append(
        _row(
            "lemma-interp",
            gamma=gamma,
            d=d,
            n=n,
            trials=trials,
            mean=f"{est.mean:.6g}",
            ci=(est.ci_lo, est.ci_hi),
            threshold=f"q90<={bound:.4f}",
            passed=ok,
        )
    )
    return report


# ---------------------------------------------------------------------------
# lemma-disamb: greedy disambiguation on random partial classes
# ---------------------------------------------------------------------------


def random_partial_class(rng, domain_size=10, max_size=40, max_vc=3, star_p=0.5):
    """Seeded random partial class with VC dimension capped by rejection."""
    while True:
        size = rng.randrange(1, max_size + 1)
        rows = []
        for _ in range(size):
            rows.append(
                "".join(
                    "*" if rng.random() < star_p else str(rng.randrange(2))
                    for _ in range(domain_size)
                )
            )
        cls = partial_concepts.PartialClass(domain_size, tuple(rows))
        if partial_concepts.partial_vc_dimension(cls) <= max_vc:
            return cls


@_timed
def run_lemma_disamb(domain_size=10, max_size=40, classes=50, max_vc=3, seed=0) -> Report:
    report = Report(
        "lemma-disamb",
        {
            "domain_size": domain_size,
            "max_size": max_size,
            "classes": classes,
            "max_vc": max_vc,
            "seed": seed,
        },
        seed=seed,
    )
    rng = core.rng_for(seed, 0)
    all_ok = True
    worst = ""
    for idx in range(classes):
        cls = random_partial_class(rng, domain_size, max_size, max_vc)
        total = partial_concepts.disambiguate(cls)
        d = partial_concepts.partial_vc_dimension(cls)
        agrees = all(
            any(
                all(a == b for a, b in zip(concept, bar) if a != partial_concepts.STAR)
                for bar in total.concepts
            )
            for concept in cls.concepts
        )
        size_ok = total.size() <= cls.size()
        if d == 0:
            bound_ok = total.size() == 1
            bound_txt = "|H~|=1 (VC 0)"
        else:
            bound = partial_concepts.ln_disambiguation_bound(d, domain_size)
            bound_ok = math.log(total.size()) <= bound
            bound_txt = f"ln|H~|={math.log(total.size()):.3f} <= {bound:.3f}"
        ok = agrees and size_ok and bound_ok
        if not ok:
            all_ok = False
            worst = f"class #{idx}: agrees={agrees} size_ok={size_ok} {bound_txt}"
        report.rows.append(
            _row(
                "lemma-disamb",
                experiment=f"disamb_{idx}",
                d=d,
                n=domain_size,
                trials=cls.size(),
                mean=total.size(),
                threshold=bound_txt,
                passed=ok,
            )
        )
    report.verdict("disambiguation_suite", all_ok, worst or f"all {classes} classes pass")
    return report


RUNNERS = {
    "thm1": run_thm1,
    "thm2": run_thm2,
    "thm3": run_thm3,
    "thm4": run_thm4,
    "thm5": run_thm5,
    "lemma-interp": run_lemma_interp,
    "lemma-disamb": run_lemma_disamb,
}


def reproduce(tag: str, seed: int = 0, threads: int = 1, **overrides) -> Report:
    """Run one tagged check with acceptance defaults plus overrides."""
    if tag not in RUNNERS:
        raise PreconditionError(f"unknown tag {tag!r}; choose from {', '.join(TAGS)}")
    runner = RUNNERS[tag]
    kwargs = dict(overrides, seed=seed)
    if tag not in ("thm1", "lemma-disamb"):
        kwargs["threads"] = threads
    return runner(**kwargs)
