"""Derandomized modular-sum coloring and its witness machinery.

The coloring maps a label (a bit function on M symbols) and a d-tuple of
symbols to the sum of the label bits modulo N.  Under the size hypothesis
(N-2) * 2^M < d, every family of equal-size cells admits a single label
and, per color, half-size subcells on which the color is forced.  The
checker establishes this analytically (per-coordinate constancy) and never
enumerates the product of subcells.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass

from .core import BudgetError, DEFAULT_BUDGET


class WitnessError(RuntimeError):
    """The constructive witness procedure failed (hypothesis violation)."""


@dataclass(frozen=True)
class ColoringParams:
    n_colors: int
    m_bits: int
    arity: int

    def __post_init__(self):
        if self.n_colors < 2 or self.m_bits < 2 or self.arity < 1:
            raise ValueError("need n_colors >= 2, m_bits >= 2, arity >= 1")

    @property
    def hypothesis_holds(self) -> bool:
        return (self.n_colors - 2) * 2**self.m_bits < self.arity

    def require_hypothesis(self):
        if not self.hypothesis_holds:
            raise WitnessError(
                f"size hypothesis fails: ({self.n_colors}-2)*2^{self.m_bits} "
                f">= {self.arity}"
            )


@dataclass(frozen=True)
class CellFamily:
    ell: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "cells", tuple(tuple(sorted(c)) for c in self.cells)
        )
        if any(len(c) != self.ell for c in self.cells):
            raise ValueError("every cell must have exactly ell symbols")


def color_of(params: ColoringParams, label, symbols) -> int:
    """Color of a symbol tuple under a label: sum of label bits mod N."""
    if len(label) != params.m_bits:
        raise ValueError("label must assign a bit to each of the M symbols")
    if any(b not in (0, 1) for b in label):
        raise ValueError("label entries must be bits")
    if len(symbols) != params.arity:
        raise ValueError(f"expected {params.arity} symbols")
    total = 0
    for x in symbols:
        if not 0 <= x < params.m_bits:
            raise ValueError(f"symbol {x} out of range")
        total += label[x]
    return total % params.n_colors


def label_to_int(label) -> int:
    return sum(b << i for i, b in enumerate(label))


def label_from_int(value: int, m_bits: int) -> tuple[int, ...]:
    return tuple((value >> i) & 1 for i in range(m_bits))


@dataclass(frozen=True)
class Witness:
    """A single label plus, per requested color, forced half-size subcells."""

    label: tuple[int, ...]
    subcells: dict  # color -> tuple over cells of subcell tuples
    index_class: tuple[int, ...]  # cells carrying the majority label
    outside_bits: dict  # cell index -> constant bit outside the class


def _balanced_label(cell, m_bits: int) -> tuple[int, ...]:
    """The lowest-index label giving both bit values at least floor(ell/2)
    preimages inside the cell: 0 on the first ceil(ell/2) elements."""
    cell = sorted(cell)
    zeros = set(cell[: (len(cell) + 1) // 2])
    ones = set(cell) - zeros
    return tuple(1 if x in ones else 0 for x in range(m_bits))


def find_witness(params: ColoringParams, family: CellFamily, colors=None) -> Witness:
    """Run the constructive procedure: balanced per-cell labels, majority
    class, constant-bit subcells outside it, and a congruence-solving subset
    inside it.  All tie-breaks are lowest-index, so runs are reproducible.

    `colors` limits which colors get subcells (default: all of them)."""
    params.require_hypothesis()
    n, m_bits, d = params.n_colors, params.m_bits, params.arity
    if len(family.cells) != d:
        raise ValueError(f"expected {d} cells")
    if not 2 <= family.ell <= m_bits:
        raise ValueError("cell size must lie in [2, m_bits]")
    half = family.ell // 2
    colors = range(n) if colors is None else list(colors)

    cell_labels = [_balanced_label(c, m_bits) for c in family.cells]
    counts = Counter(cell_labels)
    best = max(counts.values())
    label = min(h for h, c in counts.items() if c == best)
    index_class = tuple(i for i, h in enumerate(cell_labels) if h == label)
    in_class = set(index_class)

    outside_bits = {}
    outside_parts = {}
    for i in range(d):
        if i in in_class:
            continue
        cell = family.cells[i]
        zeros = [x for x in cell if label[x] == 0]
        ones = [x for x in cell if label[x] == 1]
        bit = 0 if len(zeros) >= len(ones) else 1
        part = (zeros if bit == 0 else ones)[:half]
        if len(part) < half:
            raise WitnessError(f"cell {i} has no constant part of size {half}")
        outside_bits[i] = bit
        outside_parts[i] = tuple(part)
    shift = sum(outside_bits.values())

    # the two constant parts of a class cell depend only on its cell
    zero_parts = {}
    one_parts = {}
    for i in index_class:
        cell = family.cells[i]
        zero_parts[i] = tuple(x for x in cell if label[x] == 0)[:half]
        one_parts[i] = tuple(x for x in cell if label[x] == 1)[:half]
        if len(zero_parts[i]) < half or len(one_parts[i]) < half:
            raise WitnessError(f"cell {i} lost balance under the majority label")

    per_color = {}
    for color in colors:
        need = (color - shift) % n
        if need > len(index_class):
            raise WitnessError(
                f"congruence for color {color} needs {need} cells, "
                f"majority class has {len(index_class)}"
            )
        chosen = set(index_class[:need])
        cells_for_color = []
        for i in range(d):
            if i in outside_parts:
                cells_for_color.append(outside_parts[i])
            elif i in chosen:
                cells_for_color.append(one_parts[i])
            else:
                cells_for_color.append(zero_parts[i])
        per_color[color] = tuple(cells_for_color)
    return Witness(label, per_color, index_class, outside_bits)


def check_witness(
    params: ColoringParams, family: CellFamily, witness: Witness, colors=None
) -> None:
    """Independent soundness check: sizes, containment, per-coordinate
    constancy of the label, and the forced color -- without enumerating any
    product of subcells.  Raises on the first defect.

    `colors` lists which colors the witness must cover (default: all)."""
    half = family.ell // 2
    required = range(params.n_colors) if colors is None else colors
    missing = [c for c in required if c not in witness.subcells]
    if missing:
        raise WitnessError(f"witness missing subcells for colors {missing}")
    for color, cells in sorted(witness.subcells.items()):
        if len(cells) != params.arity:
            raise WitnessError(f"color {color}: wrong number of subcells")
        total = 0
        for i, part in enumerate(cells):
            if len(part) != half:
                raise WitnessError(f"color {color}, cell {i}: size != floor(ell/2)")
            if not set(part) <= set(family.cells[i]):
                raise WitnessError(f"color {color}, cell {i}: not a subcell")
            bits = {witness.label[x] for x in part}
            if len(bits) != 1:
                raise WitnessError(f"color {color}, cell {i}: label not constant")
            total += bits.pop()
        if total % params.n_colors != color:
            raise WitnessError(f"color {color}: forced sum is {total}")


@dataclass
class OtimesReport:
    families_checked: int
    failures: list[str]
    per_ell: dict
    sampled: bool

    @property
    def ok(self) -> bool:
        return not self.failures


def family_count(params: ColoringParams, ell: int) -> int:
    return math.comb(params.m_bits, ell) ** params.arity


def iter_families(params: ColoringParams, ell: int):
    cells = list(itertools.combinations(range(params.m_bits), ell))
    for combo in itertools.product(cells, repeat=params.arity):
        yield CellFamily(ell, combo)


def sample_family(params: ColoringParams, ell: int, rng: random.Random) -> CellFamily:
    symbols = list(range(params.m_bits))
    cells = tuple(tuple(sorted(rng.sample(symbols, ell))) for _ in range(params.arity))
    return CellFamily(ell, cells)


def verify_otimes(
    params: ColoringParams,
    exhaustive: bool = True,
    budget: int = DEFAULT_BUDGET,
    samples: int = 200,
    seed: int = 0,
) -> OtimesReport:
    """Check that every (or a sample of) cell families gets a sound witness
    for every cell size."""
    params.require_hypothesis()
    rng = random.Random(seed)
    failures: list[str] = []
    per_ell: dict[int, int] = {}
    checked = 0
    sampled = False
    for ell in range(2, params.m_bits + 1):
        count = family_count(params, ell)
        if count > budget:
            if exhaustive:
                raise BudgetError(count, budget)
            families = (sample_family(params, ell, rng) for _ in range(samples))
            sampled = True
        else:
            families = iter_families(params, ell)
        done = 0
        for family in families:
            try:
                witness = find_witness(params, family)
                check_witness(params, family, witness)
            except WitnessError as exc:
                failures.append(f"ell={ell} cells={family.cells}: {exc}")
            done += 1
        per_ell[ell] = done
        checked += done
    return OtimesReport(checked, failures, per_ell, sampled)
