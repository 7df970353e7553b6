"""Partial concept classes: VC dimension, shattering strength, disambiguation.

Concepts are strings over the alphabet "01*" ('*' = undefined), which is also
the row file format the CLI reads and writes.  Shattered-set enumeration works
on bitmasks and prunes hereditarily: a set can only be shattered if all of its
subsets are, so candidates grow one element at a time from the shattered
family of the previous size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import core
from .errors import BudgetExceededError, PreconditionError

STAR = "*"
MAX_DOMAIN = 16


@dataclass(frozen=True)
class PartialClass:
    """Deduplicated set of partial concepts over a shared indexed domain."""

    domain_size: int
    concepts: tuple[str, ...]

    def __post_init__(self):
        concepts = tuple(sorted(set(self.concepts)))
        object.__setattr__(self, "concepts", concepts)
        for c in concepts:
            if len(c) != self.domain_size or any(ch not in "01*" for ch in c):
                raise PreconditionError(f"bad concept row {c!r} for domain size {self.domain_size}")

    def size(self) -> int:
        return len(self.concepts)


@dataclass(frozen=True)
class TotalClass:
    domain_size: int
    concepts: tuple[str, ...]

    def __post_init__(self):
        concepts = tuple(sorted(set(self.concepts)))
        object.__setattr__(self, "concepts", concepts)
        for c in concepts:
            if len(c) != self.domain_size or any(ch not in "01" for ch in c):
                raise PreconditionError(f"bad total concept row {c!r}")

    def size(self) -> int:
        return len(self.concepts)


def _check_domain(cls: PartialClass):
    if cls.domain_size > MAX_DOMAIN:
        raise BudgetExceededError(
            f"domain size {cls.domain_size} exceeds the cap of {MAX_DOMAIN}"
        )


def _masks(concepts):
    """(star_mask, value_mask) per concept; bit i = domain index i."""
    out = []
    for c in concepts:
        star = val = 0
        for i, ch in enumerate(c):
            if ch == STAR:
                star |= 1 << i
            elif ch == "1":
                val |= 1 << i
        out.append((star, val))
    return out


def _is_shattered(subset_mask, subset_size, masks):
    need = 1 << subset_size
    seen = set()
    for star, val in masks:
        if star & subset_mask:
            continue
        seen.add(val & subset_mask)
        if len(seen) == need:
            return True
    return len(seen) == need


def shattered_family(cls: PartialClass) -> list[int]:
    """Bitmasks of every shattered domain subset (the empty set counts for a
    nonempty class), found by size-layered search with hereditary pruning."""
    _check_domain(cls)
    if not cls.concepts:
        return []
    masks = _masks(cls.concepts)
    family = [0]
    layer = {0}
    size = 0
    n = cls.domain_size
    while layer:
        size += 1
        candidates = set()
        for base in layer:
            for i in range(n):
                bit = 1 << i
                if not base & bit:
                    candidates.add(base | bit)
        prev = layer
        layer = set()
        for cand in candidates:
            # hereditary filter: every (size-1)-subset must be shattered
            if size > 1 and any((cand & ~(1 << i)) not in prev for i in range(n) if cand & (1 << i)):
                continue
            if _is_shattered(cand, size, masks):
                layer.add(cand)
        family.extend(layer)
    return family


def partial_vc_dimension(cls: PartialClass) -> int:
    """Largest shattered-set size; 0 for the empty class (flagged convention)."""
    family = shattered_family(cls)
    if not family:
        return 0
    return max(mask.bit_count() for mask in family)


def shattering_strength(cls: PartialClass) -> int:
    """Number of shattered domain subsets; the empty set counts whenever the
    class is nonempty, and the empty class has strength 0."""
    return len(shattered_family(cls))


def ln_disambiguation_bound(d: int, n: int) -> float:
    """2 d Ln^2(e n / d) with Ln(x) = max(2, ln x); upper-bounds ln of the
    disambiguation size produced by the greedy procedure."""
    if d < 1 or n < 1:
        raise PreconditionError("bound needs d >= 1 and n >= 1")
    return 2.0 * d * max(2.0, math.log(math.e * n / d)) ** 2


class _GreedyState:
    """Shattering-strength bookkeeping for one restriction state H'.

    Restriction can only shrink the shattered family, so each state's family
    is filtered from its parent's instead of being recomputed from scratch.
    """

    __slots__ = ("indices", "family", "per_coord")

    def __init__(self, indices, family):
        self.indices = indices
        self.family = family
        self.per_coord = {}

    def restricted(self, concepts, coord, bit_value):
        want = "1" if bit_value else "0"
        kept = tuple(i for i in self.indices if concepts[i][coord] == want)
        masks = _masks(concepts[i] for i in kept)
        family = [m for m in self.family if _is_shattered(m, m.bit_count(), masks)]
        return kept, family


def disambiguate(cls: PartialClass) -> TotalClass:
    """Greedy completion of every concept into a total one.

    Scanning the domain in index order, each coordinate is written with the
    restriction-strength-maximizing label M (ties toward 1) unless the concept
    itself is defined and disagrees, in which case the concept's label is
    written and the working class restricts to the concepts sharing it.  The
    output disambiguates the input: it agrees with every concept wherever that
    concept is defined.
    """
    _check_domain(cls)
    if not cls.concepts:
        raise PreconditionError("disambiguation needs a nonempty class")
    concepts = cls.concepts
    n = cls.domain_size

    root = _GreedyState(tuple(range(len(concepts))), shattered_family(cls))
    states = {root.indices: root}

    def coord_choice(state, coord):
        cached = state.per_coord.get(coord)
        if cached is None:
            zero_branch = state.restricted(concepts, coord, 0)
            one_branch = state.restricted(concepts, coord, 1)
            majority = 1 if len(one_branch[1]) >= len(zero_branch[1]) else 0
            cached = (majority, zero_branch, one_branch)
            state.per_coord[coord] = cached
        return cached

    def child_state(keys, family):
        state = states.get(keys)
        if state is None:
            state = _GreedyState(keys, family)
            states[keys] = state
        return state

    out = []
    for ci, concept in enumerate(concepts):
        state = root
        written = []
        for coord in range(n):
            majority, zero_branch, one_branch = coord_choice(state, coord)
            ch = concept[coord]
            if ch != STAR and int(ch) == 1 - majority:
                written.append(ch)
                keys, family = zero_branch if ch == "0" else one_branch
                state = child_state(keys, family)
            else:
                written.append(str(majority))
        out.append("".join(written))
    total = TotalClass(n, tuple(out))
    for concept, bar in zip(concepts, out):
        for a, b in zip(concept, bar):
            if a != STAR and a != b:  # pragma: no cover - internal check
                raise AssertionError("greedy disambiguation violated agreement")
    return total


def loss_pattern_reduction(cls, examples, gamma: Fraction) -> PartialClass:
    """Partial concepts recording each hypothesis's loss pattern on examples:
    '0' exact match, '*' a nonzero error within gamma, '1' an error beyond
    gamma.  The VC dimension of the result is at most the gamma-graph
    dimension of the source class."""
    examples = tuple(examples)
    gamma = Fraction(gamma)
    if len(examples) > MAX_DOMAIN:
        raise BudgetExceededError(
            f"{len(examples)} examples exceed the domain cap of {MAX_DOMAIN}"
        )
    rows = set()
    for h in cls.hypotheses():
        chars = []
        for ex in examples:
            try:
                diff = abs(h.value_at(ex.point) - ex.label)
            except core.DomainMismatchError:
                diff = None
            if diff == 0:
                chars.append("0")
            elif diff is None or diff > gamma:
                chars.append("1")
            else:
                chars.append(STAR)
        rows.add("".join(chars))
    return PartialClass(len(examples), tuple(rows))


# ---------------------------------------------------------------------------
# Row file format: one concept per line, characters in {0, 1, *}
# ---------------------------------------------------------------------------


def read_rows(text: str) -> PartialClass:
    from .errors import ParseError

    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty partial-class file")
    width = len(lines[0])
    for line in lines:
        if len(line) != width or any(ch not in "01*" for ch in line):
            raise ParseError(f"bad row {line!r}")
    return PartialClass(width, tuple(lines))


def write_rows(cls) -> str:
    return "\n".join(cls.concepts) + "\n"
