"""Creature sums, block summarization, flattening, and the reduction of a
size-norm condition to uniform-per-block bad form."""
from __future__ import annotations

from dataclasses import dataclass

from .core import (
    AlignmentError,
    Condition,
    CreatingPair,
    Creature,
    SizeNormPair,
    validate_condition,
)


def sum_creatures(parts, tight: bool = False) -> Creature:
    """The sum of consecutive (possibly gapped) creatures.

    Gap slots are pinned to the value 0; the norm is the minimum over the
    parts.  A tight sum demands exact adjacency.
    """
    parts = tuple(parts)
    if not parts:
        raise ValueError("a sum needs at least one part")
    sets: list[frozenset[int]] = []
    for a, b in zip(parts, parts[1:]):
        if a.m_up > b.m_dn:
            raise AlignmentError("parts overlap")
    if tight and any(a.m_up != b.m_dn for a, b in zip(parts, parts[1:])):
        raise AlignmentError("tight sum requires adjacent parts")
    at = parts[0].m_dn
    for t in parts:
        sets.extend([frozenset({0})] * (t.m_dn - at))
        sets.extend(t.sets)
        at = t.m_up
    return Creature(
        parts[0].m_dn,
        parts[-1].m_up,
        min(t.nor for t in parts),
        tuple(sets),
        parts=parts,
    )


class SummarizedPair(CreatingPair):
    """Block-level pair over a local base pair: creatures are tight sums of
    one base creature per slot, refined componentwise.  Conditions are kept
    in flat coordinates, so flattening is structural."""

    local = False

    def __init__(self, base: CreatingPair, boundaries):
        if not base.local:
            raise ValueError("only local pairs can be summarized")
        boundaries = tuple(boundaries)
        if not boundaries or boundaries[0] != 0:
            raise ValueError("block boundaries must start at 0")
        if any(a >= b for a, b in zip(boundaries, boundaries[1:])):
            raise ValueError("block boundaries must be strictly increasing")
        if boundaries[-1] > len(base.space):
            raise ValueError("blocks exceed the base slot space")
        self.base = base
        self.space = base.space
        self.boundaries = boundaries

    def block_of(self, m_dn: int) -> int:
        try:
            return self.boundaries.index(m_dn)
        except ValueError:
            raise AlignmentError(f"slot {m_dn} is not a block boundary") from None

    def span(self, m_dn: int) -> int:
        i = self.block_of(m_dn)
        if i + 1 >= len(self.boundaries):
            raise AlignmentError(f"no block starts at slot {m_dn}")
        return self.boundaries[i + 1]

    def parts_of(self, t: Creature) -> tuple[Creature, ...]:
        if t.parts is not None:
            return t.parts
        return tuple(
            self.base.make(m, [s]) for m, s in zip(range(t.m_dn, t.m_up), t.sets)
        )

    def norm_of_sets(self, m_dn: int, sets) -> float:
        return min(
            self.base.norm_of_sets(m, [s]) for m, s in zip(range(m_dn, m_dn + len(sets)), sets)
        )

    def member(self, t: Creature) -> bool:
        if not super().member(t):
            return False
        return all(self.base.member(part) for part in self.parts_of(t))

    def block_size(self, i: int) -> int:
        return self.space.product(self.boundaries[i], self.boundaries[i + 1])


def summarize_pair(base: CreatingPair, boundaries) -> SummarizedPair:
    return SummarizedPair(base, boundaries)


def summarize_condition(spair: SummarizedPair, p: Condition) -> Condition:
    """Group a block-aligned base condition into tight block sums."""
    if len(p.w) not in spair.boundaries:
        raise AlignmentError("stem must end on a block boundary")
    creatures = []
    parts = list(p.creatures)
    at = len(p.w)
    while parts:
        hi = spair.span(at)
        block = [t for t in parts if at <= t.m_dn < hi]
        if sum(t.width for t in block) != hi - at:
            raise AlignmentError("creatures do not tile the block")
        summed = sum_creatures(block, tight=True)
        creatures.append(spair.make(at, summed.sets, parts=summed.parts))
        parts = parts[len(block):]
        at = hi
    return Condition(p.w, tuple(creatures))


def flatten_condition(spair: SummarizedPair, q: Condition) -> Condition:
    """Embed a summarized condition back into the base pair by splitting
    every block creature into its per-slot parts."""
    creatures = []
    for t in q.creatures:
        creatures.extend(spair.parts_of(t))
    return Condition(q.w, tuple(creatures))


@dataclass(frozen=True)
class ReducedForm:
    q: Condition
    boundaries: tuple[int, ...]  # absolute slot indices, starting at len(q.w)
    q_star: Condition
    spair: SummarizedPair


def reduce_to_bad_form(
    pair: SizeNormPair, p: Condition, min_block_len=None
) -> ReducedForm:
    """Strengthen p to a condition with pos size exactly i + 2 on block i,
    then sum each block.

    Leading creatures too small to shrink are absorbed into the stem (least
    value).  Block i collects creatures while it is shorter than the
    configured minimum or while the next creature cannot open block i + 1;
    shrinking keeps the least elements.
    """
    if min_block_len is None:
        min_block_len = lambda i: 1  # noqa: E731
    validate_condition(pair, p)
    w = list(p.w)
    rest = list(p.creatures)
    while rest and len(rest[0].sets[0]) < 2:
        w.append(min(rest.pop(0).sets[0]))
    if not rest:
        raise ValueError("horizon insufficient: no shrinkable creatures")

    blocks: list[list[Creature]] = []
    i = 0
    idx = 0
    while idx < len(rest):
        want = i + 2
        block: list[Creature] = []
        while idx < len(rest):
            size = len(rest[idx].sets[0])
            if size < want:
                raise ValueError(
                    f"creature at slot {rest[idx].m_dn} has pos size {size} < {want}"
                )
            if len(block) >= min_block_len(i) and size >= want + 1:
                break
            shrunk = frozenset(sorted(rest[idx].sets[0])[:want])
            block.append(pair.make(rest[idx].m_dn, [shrunk]))
            idx += 1
        if len(block) < min_block_len(i):
            raise ValueError(f"horizon insufficient for block {i}")
        blocks.append(block)
        i += 1

    q = Condition(tuple(w), tuple(t for block in blocks for t in block))
    stem = len(w)
    boundaries = [stem]
    for block in blocks:
        boundaries.append(boundaries[-1] + len(block))
    full = ([0] if stem else []) + boundaries
    spair = SummarizedPair(pair, tuple(full))
    q_star = summarize_condition(spair, q)
    return ReducedForm(q, tuple(boundaries), q_star, spair)
