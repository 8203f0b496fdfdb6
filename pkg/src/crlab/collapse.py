"""Badness witnesses and the finite-horizon collapse encoder/decoder.

A badness witness fixes a block structure, per-level label alphabets
(identified with bit functions), and the level transition functions built
from the modular-sum coloring.  `encode_real` writes a bit string into a
condition by downward induction; `decode_names` recovers it from any
branch through the result.  All transition functions are determined by the
level parameters alone, so a witness serializes as a handful of integers.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .coloring import (
    CellFamily,
    ColoringParams,
    Witness,
    check_witness,
    find_witness,
    label_to_int,
)
from .core import BlockPair, Condition, Creature, SlotSpace


def norm_drop(x) -> float:
    """The norm-drop function: floor(x/2), extended to reals."""
    return float(int(x // 2)) if x >= 0 else 0.0


@dataclass(frozen=True)
class BadnessWitness:
    """Block boundaries plus per-level label widths.

    Level i spans slots [boundaries[i], boundaries[i+1]); its labels are
    the 2^m_bits[i] bit functions on m_bits[i] symbols; slot values on
    block i range over m_bits[i] symbols as well.
    """

    boundaries: tuple[int, ...]
    m_bits: tuple[int, ...]
    growth_base: int = 2

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        object.__setattr__(self, "m_bits", tuple(self.m_bits))
        if self.boundaries[0] != 0 or any(
            a >= b for a, b in zip(self.boundaries, self.boundaries[1:])
        ):
            raise ValueError("boundaries must be strictly increasing from 0")
        if len(self.m_bits) != len(self.boundaries):
            raise ValueError("need one label width per level, inclusive of the top")

    @property
    def levels(self) -> int:
        return len(self.boundaries) - 1

    def label_count(self, level: int) -> int:
        return 2 ** self.m_bits[level]

    def n_colors(self, level: int) -> int:
        """Size of the transition target: next-level labels times 2."""
        return 2 * self.label_count(level + 1)

    def block_len(self, level: int) -> int:
        return self.boundaries[level + 1] - self.boundaries[level]

    def coloring_params(self, level: int) -> ColoringParams:
        return ColoringParams(self.n_colors(level), self.m_bits[level], self.block_len(level))

    def slot_space(self) -> SlotSpace:
        sizes = []
        for i in range(self.levels):
            sizes.extend([self.m_bits[i]] * self.block_len(i))
        return SlotSpace(tuple(sizes))

    def block_pair(self) -> BlockPair:
        return BlockPair(self.slot_space(), self.boundaries)


def build_badness(levels: int, growth_base: int = 2, level_offset: int = 0) -> BadnessWitness:
    """Construct a witness whose every level satisfies the coloring size
    hypothesis; block lengths are the minimum of what the hypothesis and
    the growth schedule demand.  `level_offset` shifts the label widths so
    that full creatures clear the norm gate (> 4) at low levels."""
    if levels < 1:
        raise ValueError("need at least one level")
    if growth_base < 2:
        raise ValueError("growth base must be at least 2")
    m_bits = tuple(i + 2 + level_offset for i in range(levels + 1))
    boundaries = [0]
    for i in range(levels):
        n_colors = 2 * 2 ** m_bits[i + 1]
        hypothesis_min = (n_colors - 2) * 2 ** m_bits[i] + 1
        growth_min = growth_base ** (i + 3) + 1
        boundaries.append(boundaries[-1] + max(hypothesis_min, growth_min))
    witness = BadnessWitness(tuple(boundaries), m_bits, growth_base)
    for i in range(levels):
        witness.coloring_params(i).require_hypothesis()
    return witness


def transition(witness: BadnessWitness, level: int, label: int, prefix) -> tuple[int, int]:
    """The level transition: (label, branch prefix) -> (next label, bit).

    Reads only the block-i coordinates of the prefix, sums the label bits
    at those symbols modulo the color count, and splits the color into the
    next-level label and the emitted bit.
    """
    lo, hi = witness.boundaries[level], witness.boundaries[level + 1]
    if len(prefix) < hi:
        raise ValueError(f"branch prefix must cover slot {hi}")
    if not 0 <= label < witness.label_count(level):
        raise ValueError("label out of range for this level")
    total = 0
    for m in range(lo, hi):
        total += (label >> prefix[m]) & 1
    color = total % witness.n_colors(level)
    return divmod(color, 2)


@dataclass(frozen=True)
class NameSeed:
    level: int
    label: int


def decode_names(witness: BadnessWitness, branch, seed: NameSeed, horizon: int):
    """Apply the name recursions along a branch.

    Returns (labels, bits): labels[0] is the seed, labels[t+1] and bits[t]
    come from the level seed.level + t transition on the branch prefix.
    """
    if seed.level + horizon > witness.levels:
        raise ValueError("horizon exceeds the witness levels")
    if len(branch) < witness.boundaries[seed.level + horizon]:
        raise ValueError("branch too short for the requested horizon")
    labels = [seed.label]
    bits = []
    for step in range(horizon):
        nxt, bit = transition(witness, seed.level + step, labels[-1], branch)
        labels.append(nxt)
        bits.append(bit)
    return labels, bits


@dataclass(frozen=True)
class DeltaWitness:
    label: int
    refinements: dict  # (next label, bit) -> Creature
    coloring: Witness


def _creature_cells(witness: BadnessWitness, level: int, t: Creature) -> CellFamily:
    ell = min(len(s) for s in t.sets)
    return CellFamily(ell, tuple(tuple(sorted(s)[:ell]) for s in t.sets))


def verify_delta(
    witness: BadnessWitness, pair: BlockPair, level: int, t: Creature
) -> DeltaWitness:
    """For a block creature of norm > 4, produce one label and, per target
    (next label, bit), a refinement forcing the transition to that target.

    Soundness is established by the per-coordinate constancy checker; the
    product of possibilities is never enumerated.
    """
    if t.m_dn != witness.boundaries[level]:
        raise ValueError(f"creature must start at the level-{level} boundary")
    if t.nor <= 4:
        raise ValueError("norm precondition: nor > 4 required")
    params = witness.coloring_params(level)
    family = _creature_cells(witness, level, t)
    cw = find_witness(params, family)
    check_witness(params, family, cw)
    floor_bound = min(norm_drop(t.nor), norm_drop(level))
    refinements = {}
    for nxt in range(witness.label_count(level + 1)):
        for bit in (0, 1):
            color = nxt * 2 + bit
            s = pair.make(t.m_dn, cw.subcells[color])
            if not pair.refines(s, t):
                raise ValueError("witness refinement escapes the creature")
            if s.nor < floor_bound:
                raise ValueError(
                    f"refinement norm {s.nor} below min(h(nor), h(level)) = {floor_bound}"
                )
            refinements[(nxt, bit)] = s
    return DeltaWitness(label_to_int(cw.label), refinements, cw)


@dataclass(frozen=True)
class EncodeResult:
    q: Condition
    seed: NameSeed
    labels: tuple[int, ...]  # the internal chain, labels[0] == seed.label
    norms: tuple[float, ...]  # norms of the replaced creatures


def encode_real(witness: BadnessWitness, pair: BlockPair, p: Condition, bits) -> EncodeResult:
    """Strengthen p so that every branch through it decodes to `bits`.

    Downward induction from the top encoded level: each level's coloring
    witness supplies the label, and the subcell for the target (label
    above, bit) supplies the replacement creature.
    """
    bits = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0/1")
    try:
        start = witness.boundaries.index(len(p.w))
    except ValueError:
        raise ValueError("stem length must sit on a block boundary") from None
    if not bits:
        return EncodeResult(p, NameSeed(start, 0), (0,), ())
    if start + len(bits) > witness.levels:
        raise ValueError("horizon too short for the requested bit string")
    if len(p.creatures) < len(bits):
        raise ValueError("condition carries too few creatures for the bit string")
    for j in range(len(bits)):
        if p.creatures[j].nor <= 4:
            raise ValueError(f"creature {j} has norm <= 4")

    top = len(bits) - 1
    labels = [0] * (len(bits) + 1)  # labels[j] is the level start+j label
    replaced: list[Creature | None] = [None] * len(bits)
    for j in range(top, -1, -1):
        level = start + j
        t = p.creatures[j]
        params = witness.coloring_params(level)
        family = _creature_cells(witness, level, t)
        target = labels[j + 1] * 2 + bits[j]
        cw = find_witness(params, family, colors=[target])
        check_witness(params, family, cw, colors=[target])
        s = pair.make(t.m_dn, cw.subcells[target])
        floor_bound = min(norm_drop(t.nor), norm_drop(level))
        if s.nor < floor_bound:
            raise ValueError("encoded creature norm below the induction bound")
        replaced[j] = s
        labels[j] = label_to_int(cw.label)
    q = Condition(p.w, tuple(replaced) + p.creatures[len(bits):])
    return EncodeResult(
        q,
        NameSeed(start, labels[0]),
        tuple(labels),
        tuple(s.nor for s in replaced),
    )


def sample_branch(q: Condition, length: int, rng: random.Random):
    """A random branch through q's stem and creatures, up to `length` slots."""
    branch = list(q.w)
    for t in q.creatures:
        for s in t.sets:
            branch.append(rng.choice(sorted(s)))
    if len(branch) < length:
        raise ValueError("condition horizon too short for the requested branch")
    return branch[:length]
