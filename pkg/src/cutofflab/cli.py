"""Command-line front end.

Subcommands: dims, oig, disambiguate, estimate, reproduce.  Exit codes are
stable API: 0 pass, 1 experiment fail, 2 parse error, 3 budget refusal,
4 precondition violation.  CUTOFFLAB_BUDGET overrides search budgets.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from functools import partial as bind

from . import adversaries, core, dims, experiments, learners, mc, serialize
from . import partial as partial_concepts
from .errors import (
    BudgetExceededError,
    CutoffLabError,
    EmptySampleError,
    NotRealizableError,
    ParseError,
    PreconditionError,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_PRECONDITION = 4


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r} (use p/q)") from exc


def _parse_points(spec: str) -> tuple[core.Point, ...]:
    """Point list: "1..8" or "1,2,5" for nat points, "4/1,4/2" for
    block/index pairs."""
    points = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "/" in chunk:
            k, x = chunk.split("/")
            points.append(core.Point.pair(int(k), int(x)))
        elif ".." in chunk:
            lo, hi = chunk.split("..")
            points.extend(core.Point.nat(i) for i in range(int(lo), int(hi) + 1))
        else:
            points.append(core.Point.nat(int(chunk)))
    if not points:
        raise ParseError(f"no points in {spec!r}")
    return tuple(points)


def _write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(experiments.CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())


def _emit_report(report, args) -> int:
    if getattr(args, "out", None):
        _write_csv(report.rows, args.out)
    if getattr(args, "json", False):
        print(json.dumps(report.to_json(), indent=2, sort_keys=True, default=str))
    else:
        print(f"# {report.tag}  seed={report.seed}  wall_clock={report.wall_clock_s}s")
        for name, ok, detail in report.verdicts:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_dims(args) -> int:
    cls = serialize.class_from_json(serialize.load_json(args.class_file))
    gamma = _rational(args.gamma)
    pool = _parse_points(args.pool) if args.pool else cls.default_pool()
    dimension = dims.gamma_graph_dimension(cls, pool, gamma, args.cap_d)
    cert = dims.find_shattered_set(cls, pool, gamma, dimension) if dimension else None
    out = {
        "graph_dim": dimension,
        "budget_exceeded": False,
        "certificate": None
        if cert is None
        else {
            "points": [serialize.point_to_json(p) for p in cert.points],
            "witness": serialize.hypothesis_to_json(cert.witness),
            "patterns": len(cert.pattern_witnesses),
        },
    }
    if args.oig_points:
        points = _parse_points(args.oig_points)
        graph = dims.build_oig(cls, points)
        orientation = dims.orient_smallest_value(graph)
        out["oig"] = {
            "points": len(points),
            "vertices": len(graph.vertices),
            "edges": len(graph.edges),
            "max_gamma_outdegree": dims.max_gamma_outdegree(graph, orientation, gamma),
        }
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"graph_dim: {dimension}")
        if cert is not None:
            points = ",".join(str(p) for p in cert.points)
            print(f"certificate: {len(cert.pattern_witnesses)} patterns on [{points}]")
        if "oig" in out:
            print(f"oig_max_gamma_outdegree: {out['oig']['max_gamma_outdegree']}")
    return EXIT_PASS


def cmd_oig(args) -> int:
    cls = serialize.class_from_json(serialize.load_json(args.class_file))
    gamma = _rational(args.gamma)
    points = _parse_points(args.points)
    graph = dims.build_oig(cls, points)
    orientation = dims.orient_smallest_value(graph)
    greedy = dims.max_gamma_outdegree(graph, orientation, gamma)
    out = {
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "smallest_value_outdegree": greedy,
    }
    if args.exhaustive:
        _, best = dims.exhaustive_orientation_min(graph, gamma)
        out["min_outdegree"] = best
    if args.subgraphs:
        rng = core.rng_for(args.seed, 0)
        worst = 0
        for _ in range(args.subgraphs):
            size = rng.randrange(1, len(graph.vertices) + 1)
            kept = rng.sample(list(graph.vertices), size)
            sub = dims.induced_subgraph(graph, kept)
            worst = max(
                worst,
                dims.max_gamma_outdegree(sub, dims.orient_smallest_value(sub), gamma),
            )
        out["subgraph_max_outdegree"] = worst
    print(json.dumps(out, indent=2, sort_keys=True) if args.json else
          "\n".join(f"{k}: {v}" for k, v in out.items()))
    return EXIT_PASS


def cmd_disambiguate(args) -> int:
    try:
        with open(args.infile) as fh:
            cls = partial_concepts.read_rows(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {args.infile}: {exc}") from exc
    total = partial_concepts.disambiguate(cls)
    d = partial_concepts.partial_vc_dimension(cls)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(partial_concepts.write_rows(total))
    import math

    if d >= 1:
        bound = partial_concepts.ln_disambiguation_bound(d, cls.domain_size)
        ok = math.log(total.size()) <= bound
        bound_txt = f"{bound:.4f}"
    else:
        ok = total.size() == 1
        bound_txt = "size=1 (VC 0)"
    print(
        f"|H|: {cls.size()}  |H~|: {total.size()}  d: {d}  n: {cls.domain_size}  "
        f"bound: {bound_txt}  pass: {ok}"
    )
    return EXIT_PASS if ok else EXIT_FAIL


def _learner_from_config(config, cls, gamma):
    interp = bind(learners.generic_interpolator, cls)
    kind = config.get("learner")
    if kind == "median3":
        return learners.MedianOfThree(interp)
    if kind == "single":
        return learners.SingleInterpolator(interp)
    if kind == "proper_erm":
        return learners.ProperERM(cls, gamma)
    if kind == "agg":
        rule_name = config.get("rule", "median")
        if isinstance(rule_name, dict) and "order" in rule_name:
            rule = learners.OrderStatistic(int(rule_name["order"]))
        elif rule_name == "median":
            rule = learners.Median()
        elif rule_name == "mean":
            rule = learners.Mean()
        else:
            raise ParseError(f"unknown rule {rule_name!r}")
        part = config.get("partition", {"kind": "disjoint", "m": 3})
        if part.get("kind") == "disjoint":
            partitioner = learners.DisjointBlocks(int(part["m"]))
        elif part.get("kind") == "windows":
            partitioner = learners.OverlappingWindows(int(part["m"]), int(part["width"]))
        elif part.get("kind") == "bootstrap":
            partitioner = learners.Bootstrap(
                int(part["m"]), int(part["size"]), int(part.get("seed", 0))
            )
        else:
            raise ParseError(f"unknown partition {part!r}")
        return learners.InterpolatorAggregation(interp, partitioner, rule)
    raise ParseError(f"unknown learner config {config!r}")


def cmd_estimate(args) -> int:
    config = serialize.load_json(args.config)
    try:
        cls = serialize.class_from_json(config["class"])
        dist = serialize.distribution_from_json(config["distribution"])
        gamma = serialize.rational_from_str(config["gamma"])
        n = int(config["n"])
        trials = int(config.get("trials", args.trials))
    except KeyError as exc:
        raise ParseError(f"estimate config missing key: {exc}") from exc
    learner = _learner_from_config(config.get("learner_config", config), cls, gamma)
    instance = adversaries.HardInstance(
        theorem=str(config.get("tag", "estimate")),
        cls=cls,
        distribution=dist,
        witness=dist.witness if dist.witness is not None else cls.first_consistent(()),
        gamma=gamma,
        epsilon=None,
        d=None,
        universe=None,
        n_max=None,
    )
    est = mc.mc_expected_loss(learner, instance, n, trials, args.seed, threads=args.threads)
    out = {
        "mean": est.mean,
        "stderr": est.stderr,
        "ci_lo": est.ci_lo,
        "ci_hi": est.ci_hi,
        "trials": est.trials,
        "seed": args.seed,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_PASS


def cmd_reproduce(args) -> int:
    overrides = {}
    if args.replay:
        echoed = serialize.load_json(args.replay)
        try:
            tag = echoed["tag"]
            seed = int(echoed["seed"])
            config = echoed.get("config", {})
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad report file: {exc}") from exc
        import inspect

        accepted = set(inspect.signature(experiments.RUNNERS[tag]).parameters)
        for key in ("gamma", "epsilon"):
            if key in config and key in accepted:
                overrides[key] = Fraction(str(config[key]))
        for key in ("d", "universe", "n", "n_prime", "m_bound", "trials",
                    "domain_size", "max_size", "classes", "max_vc"):
            if key in config and key in accepted:
                overrides[key] = int(config[key])
        if "ns" in config and "ns" in accepted:
            overrides["ns"] = tuple(int(v) for v in config["ns"])
        if "delta" in config and "delta" in accepted:
            overrides["delta"] = float(config["delta"])
    else:
        tag = args.tag
        seed = args.seed
        if args.gamma:
            overrides["gamma"] = _rational(args.gamma)
        if args.epsilon:
            overrides["epsilon"] = _rational(args.epsilon)
        if args.d is not None:
            overrides["d"] = args.d
        if args.universe is not None:
            overrides["universe"] = args.universe
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.n:
            ns = tuple(int(v) for v in args.n.split(","))
            if tag == "thm4":
                overrides["ns"] = ns
            elif tag == "lemma-interp":
                overrides["n"] = ns[0]
            elif tag == "thm3":
                overrides["n_prime"] = ns[0]
    report = experiments.reproduce(tag, seed=seed, threads=args.threads, **overrides)
    return _emit_report(report, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutofflab",
        description="Aggregation-vs-interpolation checks under the cutoff loss",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dims = sub.add_parser("dims", help="graph dimension report for a class file")
    p_dims.add_argument("class_file")
    p_dims.add_argument("--gamma", required=True)
    p_dims.add_argument("--pool", default=None, help='points, e.g. "1..8" or "4/1,4/2"')
    p_dims.add_argument("--cap-d", type=int, default=dims.DEFAULT_POINT_CAP)
    p_dims.add_argument("--oig-points", default=None)
    p_dims.add_argument("--json", action="store_true")
    p_dims.set_defaults(fn=cmd_dims)

    p_oig = sub.add_parser("oig", help="one-inclusion graph orientation evidence")
    p_oig.add_argument("class_file")
    p_oig.add_argument("--gamma", required=True)
    p_oig.add_argument("--points", required=True)
    p_oig.add_argument("--exhaustive", action="store_true")
    p_oig.add_argument(
        "--subgraphs", type=int, default=0, help="also test N random induced subgraphs"
    )
    p_oig.add_argument("--seed", type=int, default=0)
    p_oig.add_argument("--json", action="store_true")
    p_oig.set_defaults(fn=cmd_oig)

    p_dis = sub.add_parser("disambiguate", help="greedy disambiguation of a row file")
    p_dis.add_argument("infile")
    p_dis.add_argument("--out", default=None)
    p_dis.set_defaults(fn=cmd_disambiguate)

    p_est = sub.add_parser("estimate", help="Monte Carlo loss estimate from a config file")
    p_est.add_argument("config")
    p_est.add_argument("--trials", type=int, default=1000)
    p_est.add_argument("--seed", type=int, default=0)
    p_est.add_argument("--threads", type=int, default=1)
    p_est.set_defaults(fn=cmd_estimate)

    p_rep = sub.add_parser("reproduce", help="run one tagged quantitative check")
    p_rep.add_argument("tag", nargs="?", choices=experiments.TAGS)
    p_rep.add_argument("--gamma")
    p_rep.add_argument("--epsilon")
    p_rep.add_argument("--d", type=int)
    p_rep.add_argument(
        "--universe", type=int, help="universe size; 0 = derive from the construction"
    )
    p_rep.add_argument("--n", help="sample size(s), comma separated for thm4")
    p_rep.add_argument("--trials", type=int)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--threads", type=int, default=1)
    p_rep.add_argument("--out", help="write result rows as CSV")
    p_rep.add_argument("--json", action="store_true")
    p_rep.add_argument("--replay", help="re-run from a report's config echo")
    p_rep.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "reproduce" and not args.tag and not args.replay:
        parser.error("reproduce needs a tag or --replay")
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PreconditionError, EmptySampleError, NotRealizableError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CutoffLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
