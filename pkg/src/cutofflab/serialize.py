"""JSON-shaped serialization for classes, distributions, samples and learners.

Rationals travel as "p/q" strings, points as {"nat": 3} or {"pair": [4, 2]}.
All readers raise ParseError on malformed input so the CLI can map it to a
stable exit code.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import core
from .errors import ParseError


def rational_to_str(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def rational_from_str(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def point_to_json(point: core.Point):
    if point.kind == "nat":
        return {"nat": point.n}
    return {"pair": [point.block, point.index]}


def point_from_json(obj) -> core.Point:
    if not isinstance(obj, dict):
        raise ParseError(f"bad point {obj!r}")
    if "nat" in obj:
        return core.Point.nat(int(obj["nat"]))
    if "pair" in obj:
        k, x = obj["pair"]
        return core.Point.pair(int(k), int(x))
    raise ParseError(f"bad point {obj!r}")


def hypothesis_to_json(h):
    if isinstance(h, core.CantorHypothesis):
        return {
            "kind": "cantor_hypothesis",
            "members": sorted(h.members),
            "value": rational_to_str(h.value),
        }
    if isinstance(h, core.SplitCantorHypothesis):
        return {
            "kind": "split_cantor_hypothesis",
            "k": h.k,
            "members": sorted(h.members),
            "zero_on": h.zero_on,
            "value": rational_to_str(h.value),
        }
    if isinstance(h, core.TableHypothesis):
        return {
            "kind": "table_hypothesis",
            "entries": [[point_to_json(p), rational_to_str(v)] for p, v in h.table],
            "default": rational_to_str(h.default),
        }
    raise ParseError(f"unknown hypothesis {h!r}")


def hypothesis_from_json(obj):
    try:
        kind = obj["kind"]
        if kind == "cantor_hypothesis":
            return core.CantorHypothesis(
                frozenset(int(m) for m in obj["members"]), rational_from_str(obj["value"])
            )
        if kind == "split_cantor_hypothesis":
            return core.SplitCantorHypothesis(
                int(obj["k"]),
                frozenset(int(m) for m in obj["members"]),
                str(obj["zero_on"]),
                rational_from_str(obj["value"]),
            )
        if kind == "table_hypothesis":
            entries = tuple(
                (point_from_json(p), rational_from_str(v)) for p, v in obj["entries"]
            )
            return core.TableHypothesis(entries, rational_from_str(obj["default"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad hypothesis record: {exc}") from exc
    raise ParseError(f"unknown hypothesis kind {obj!r}")


def class_to_json(cls):
    if isinstance(cls, core.CantorClass):
        return {
            "kind": "cantor",
            "gamma": rational_to_str(cls.gamma),
            "d": cls.d,
            "universe": cls.universe,
        }
    if isinstance(cls, core.SplitCantorClass):
        return {
            "kind": "split_cantor",
            "gamma": rational_to_str(cls.gamma),
            "variant": cls.variant,
            "size_param": cls.size_param,
            "universe_cap": cls.universe_cap,
        }
    if isinstance(cls, core.FiniteClass):
        return {
            "kind": "finite",
            "hypotheses": [hypothesis_to_json(h) for h in cls.hypotheses_list],
        }
    raise ParseError(f"unknown class {cls!r}")


def class_from_json(obj):
    try:
        kind = obj["kind"]
        if kind == "cantor":
            return core.CantorClass(
                rational_from_str(obj["gamma"]), int(obj["d"]), int(obj["universe"])
            )
        if kind == "split_cantor":
            size_param = obj.get("size_param")
            return core.SplitCantorClass(
                rational_from_str(obj["gamma"]),
                str(obj["variant"]),
                None if size_param is None else int(size_param),
                int(obj["universe_cap"]),
            )
        if kind == "finite":
            return core.FiniteClass(tuple(hypothesis_from_json(h) for h in obj["hypotheses"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad class record: {exc}") from exc
    raise ParseError(f"unknown class kind {obj!r}")


def distribution_to_json(dist: core.FiniteDistribution):
    out = {
        "kind": "finite_distribution",
        "atoms": [
            {
                "point": point_to_json(a.point),
                "label": rational_to_str(a.label),
                "mass": rational_to_str(a.mass),
            }
            for a in dist.atoms
        ],
    }
    if dist.witness is not None:
        out["witness"] = hypothesis_to_json(dist.witness)
    return out


def distribution_from_json(obj) -> core.FiniteDistribution:
    try:
        atoms = tuple(
            core.Atom(
                point_from_json(a["point"]),
                rational_from_str(a["label"]),
                rational_from_str(a["mass"]),
            )
            for a in obj["atoms"]
        )
        witness = obj.get("witness")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad distribution record: {exc}") from exc
    return core.FiniteDistribution(
        atoms, None if witness is None else hypothesis_from_json(witness)
    )


def sample_to_json(sample):
    return [
        {"point": point_to_json(ex.point), "label": rational_to_str(ex.label)}
        for ex in sample
    ]


def sample_from_json(obj):
    try:
        return tuple(
            core.LabeledExample(point_from_json(ex["point"]), rational_from_str(ex["label"]))
            for ex in obj
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad sample record: {exc}") from exc


def instance_to_json(instance):
    """HardInstance record with its tag and all derived parameters, so an
    experiment can be replayed from file."""
    return {
        "kind": "hard_instance",
        "theorem_tag": instance.theorem,
        "class": class_to_json(instance.cls),
        "distribution": distribution_to_json(instance.distribution),
        "witness": hypothesis_to_json(instance.witness),
        "gamma": rational_to_str(instance.gamma),
        "epsilon": None if instance.epsilon is None else rational_to_str(instance.epsilon),
        "d": instance.d,
        "universe": instance.universe,
        "n_max": instance.n_max,
        "params": {
            k: rational_to_str(v) if isinstance(v, Fraction) else list(v) if isinstance(v, tuple) else v
            for k, v in instance.params.items()
        },
    }


def instance_from_json(obj):
    from .adversaries import HardInstance

    try:
        return HardInstance(
            theorem=str(obj["theorem_tag"]),
            cls=class_from_json(obj["class"]),
            distribution=distribution_from_json(obj["distribution"]),
            witness=hypothesis_from_json(obj["witness"]),
            gamma=rational_from_str(obj["gamma"]),
            epsilon=None if obj.get("epsilon") is None else rational_from_str(obj["epsilon"]),
            d=obj.get("d"),
            universe=obj.get("universe"),
            n_max=obj.get("n_max"),
            params={
                k: tuple(v) if isinstance(v, list) else v
                for k, v in obj.get("params", {}).items()
            },
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad instance record: {exc}") from exc


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read JSON from {path}: {exc}") from exc


def dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
