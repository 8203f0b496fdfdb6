"""The epsilon-half construction over symbolic creatures, coordinate split
maps, condition split/merge, and the stem-product bound checker.

Symbolic creatures carry only the double-log exponent of their possibility
set and a drop index; refinement shrinks the exponent and raises the drop.
Halving moves the drop to the (rounded-up) midpoint; un-halving restores
the original drop on the smaller set.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import AlignmentError, Condition, Creature
from .norms import tower_norm


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class SymbolicCreature:
    """One-slot creature whose possibility set has size 2^(2^lam)."""

    slot: int
    lam: Fraction
    drop: Fraction
    k: int

    def __post_init__(self):
        lam, drop = Fraction(self.lam), Fraction(self.drop)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "drop", drop)
        if not 0 <= drop <= lam:
            raise ValueError("drop index must lie in [0, lam]")
        if self.k < 1:
            raise ValueError("norm divisor must be positive")

    @property
    def nor(self) -> float:
        return tower_norm(self.lam, self.drop, self.k)

    def refines(self, other: "SymbolicCreature") -> bool:
        return (
            self.slot == other.slot
            and self.k == other.k
            and self.lam <= other.lam
            and self.drop >= other.drop
        )


def half(t: SymbolicCreature, epsilon: Fraction) -> SymbolicCreature:
    """The epsilon-half: same set, drop moved up to ceil of the midpoint
    between the exponent and the current drop.  Costs at most epsilon of
    norm when nor >= 2 and epsilon >= 2/k."""
    epsilon = Fraction(epsilon)
    if t.nor < 2:
        raise ValueError("halving requires norm >= 2")
    if epsilon < Fraction(2, t.k):
        raise ValueError("epsilon must be at least 2/k")
    j = (t.lam + t.drop) / 2
    return SymbolicCreature(t.slot, t.lam, Fraction(_ceil(j)), t.k)


def unhalve(
    s: SymbolicCreature, t: SymbolicCreature, epsilon: Fraction
) -> SymbolicCreature:
    """Given a refinement s of half(t, epsilon) with norm above 1, restore
    the original drop on s's set.  The result refines t, keeps s's
    possibility set, and loses at most epsilon from t's norm."""
    epsilon = Fraction(epsilon)
    halved = half(t, epsilon)
    if not s.refines(halved):
        raise ValueError("creature does not refine the half")
    if s.nor <= 1:
        raise ValueError("un-halving requires norm > 1")
    t0 = SymbolicCreature(t.slot, s.lam, t.drop, t.k)
    if t0.nor < t.nor - float(epsilon) - 1e-9:
        raise AssertionError("un-halving lost more norm than epsilon")
    return t0


@dataclass(frozen=True)
class HalvingRow:
    lam: Fraction
    drop: Fraction
    k: int
    kind: str  # "half", "unhalve", "midpoint", "skipped"
    lhs: float
    rhs: float
    ok: bool
    note: str = ""


@dataclass
class HalvingReport:
    rows: list[HalvingRow]
    creatures_checked: int
    skipped: int

    @property
    def violations(self):
        return [r for r in self.rows if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_halving_property(
    creatures,
    epsilon=None,
    refinement_lams=None,
    refinement_extra_drops=(0, 1, 4),
    tol: float = 1e-9,
) -> HalvingReport:
    """Sweep the half/un-halve contract over symbolic creatures.

    For each creature with norm >= 2: the half loses at most epsilon; every
    admissible refinement of the half with norm > 1 un-halves back to
    within epsilon of the original norm with the smaller set; and the exact
    midpoint drop costs exactly 1/k whenever the norm is >= 2.
    """
    rows: list[HalvingRow] = []
    checked = 0
    skipped = 0
    for t in creatures:
        eps = Fraction(2, t.k) if epsilon is None else Fraction(epsilon)
        if t.nor < 2:
            skipped += 1
            rows.append(
                HalvingRow(t.lam, t.drop, t.k, "skipped", t.nor, 2.0, True, "norm below 2")
            )
            continue
        checked += 1
        h = half(t, eps)
        rows.append(
            HalvingRow(
                t.lam, t.drop, t.k, "half", h.nor, t.nor - float(eps),
                h.nor >= t.nor - float(eps) - tol,
            )
        )
        j = (t.lam + t.drop) / 2
        mid = tower_norm(t.lam, j, t.k)
        rows.append(
            HalvingRow(
                t.lam, t.drop, t.k, "midpoint", mid, t.nor - 1.0 / t.k,
                abs(mid - (t.nor - 1.0 / t.k)) <= tol,
            )
        )
        lam_options = [t.lam] if refinement_lams is None else [
            Fraction(x) for x in refinement_lams if Fraction(x) <= t.lam
        ]
        for lam_s in lam_options:
            for extra in refinement_extra_drops:
                drop_s = h.drop + extra
                if drop_s > lam_s:
                    continue
                s = SymbolicCreature(t.slot, lam_s, drop_s, t.k)
                if s.nor <= 1:
                    continue
                t0 = unhalve(s, t, eps)
                ok = (
                    t0.nor >= t.nor - float(eps) - tol
                    and t0.lam == s.lam
                    and t0.refines(t)
                )
                rows.append(
                    HalvingRow(
                        t.lam, t.drop, t.k, "unhalve", t0.nor, t.nor - float(eps), ok,
                        note=f"lam_s={lam_s} drop_s={drop_s}",
                    )
                )
    return HalvingReport(rows, checked, skipped)


@dataclass(frozen=True)
class SplitMaps:
    """Interval split of the coordinate axis with its factor enumerations."""

    bounds: tuple[int, ...]  # n_0 = 0 < n_1 < ...
    horizon: int
    sizes: tuple[int, ...]  # |H(n)| for n < horizon
    k_values: tuple[int, ...]  # norm divisor per slot

    def __post_init__(self):
        if self.bounds[0] != 0 or any(
            a >= b for a, b in zip(self.bounds, self.bounds[1:])
        ):
            raise ValueError("bounds must be strictly increasing from 0")
        if len(self.sizes) != self.horizon or len(self.k_values) != self.horizon:
            raise ValueError("need one size and one divisor per slot")

    def even_intervals(self):
        """Slots in the even-interval factor: union of [n_2i, n_2i+1)."""
        out = []
        for i in range(0, len(self.bounds), 2):
            lo = self.bounds[i]
            hi = self.bounds[i + 1] if i + 1 < len(self.bounds) else self.horizon
            out.extend(range(lo, min(hi, self.horizon)))
        return tuple(out)

    def odd_intervals(self):
        even = set(self.even_intervals())
        return tuple(n for n in range(self.horizon) if n not in even)

    def enumeration(self, factor: int):
        """The increasing enumeration of the factor's slot set."""
        return self.even_intervals() if factor == 0 else self.odd_intervals()

    def factor_sizes(self, factor: int):
        return tuple(self.sizes[n] for n in self.enumeration(factor))

    def factor_levels(self, factor: int):
        """Per-level (stem length, epsilon) for the factor's halving data:
        level i sits at the factor preimage of bound 2i + factor, with
        epsilon = 2 / k at that bound."""
        enum = self.enumeration(factor)
        levels = []
        for i in range(len(self.bounds)):
            idx = 2 * i + factor
            if idx >= len(self.bounds):
                break
            n = self.bounds[idx]
            if n >= self.horizon or n not in enum:
                break
            levels.append((enum.index(n), Fraction(2, self.k_values[n])))
        return levels


def build_split(sizes, k_fn, target_levels: int) -> SplitMaps:
    """Recursively pick bounds: each next bound is the least slot whose
    norm divisor reaches twice the product of all slot sizes below the
    previous bound."""
    sizes = tuple(sizes)
    horizon = len(sizes)
    k_values = tuple(int(k_fn(n)) for n in range(horizon))
    if any(a > b for a, b in zip(k_values, k_values[1:])):
        raise ValueError("the norm divisor sequence must be non-decreasing")
    bounds = [0]
    for _ in range(target_levels):
        need = 2 * math.prod(sizes[: bounds[-1]])
        nxt = None
        for n in range(bounds[-1] + 1, horizon):
            if k_values[n] >= need:
                nxt = n
                break
        if nxt is None:
            raise ValueError(
                f"no slot below the horizon has divisor >= {need}; "
                "shorten the levels or extend the horizon"
            )
        bounds.append(nxt)
    return SplitMaps(tuple(bounds), horizon, sizes, k_values)


def split_condition(p: Condition, maps: SplitMaps) -> tuple[Condition, Condition]:
    """Restrict stem and creatures coordinatewise along the two factor
    enumerations.  The stem must end on one of the split bounds."""
    if len(p.w) not in maps.bounds:
        raise AlignmentError("stem length must be one of the split bounds")
    halves = []
    for factor in (0, 1):
        enum = maps.enumeration(factor)
        stem = tuple(p.w[n] for n in enum if n < len(p.w))
        creatures = []
        at = len(stem)
        for t in p.creatures:
            if t.width != 1:
                raise ValueError("splitting requires local creatures")
            if t.m_dn in enum:
                creatures.append(Creature(at, at + 1, t.nor, t.sets, t.parts))
                at += 1
        halves.append(Condition(stem, tuple(creatures)))
    return halves[0], halves[1]


def merge_conditions(p0: Condition, p1: Condition, maps: SplitMaps) -> Condition:
    """Inverse of split_condition."""
    stem_len = len(p0.w) + len(p1.w)
    if stem_len not in maps.bounds:
        raise AlignmentError("merged stem length must be one of the split bounds")
    enums = (maps.enumeration(0), maps.enumeration(1))
    w = [None] * stem_len
    slots: dict[int, Creature] = {}
    for factor, part in enumerate((p0, p1)):
        enum = enums[factor]
        for i, v in enumerate(part.w):
            w[enum[i]] = v
        for t in part.creatures:
            slots[enum[t.m_dn]] = t
    if any(v is None for v in w):
        raise AlignmentError("factor stems do not cover the merged stem")
    creatures = []
    at = stem_len
    while at in slots:
        t = slots.pop(at)
        creatures.append(Creature(at, at + 1, t.nor, t.sets, t.parts))
        at += 1
    if slots:
        raise AlignmentError(f"factor creatures leave gaps at {sorted(slots)}")
    return Condition(tuple(w), tuple(creatures))


@dataclass(frozen=True)
class BoundRow:
    level: int
    stem_len: int
    product: int
    epsilon: Fraction
    ok: bool


@dataclass
class BoundReport:
    rows: list[BoundRow]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def first_failure(self):
        for r in self.rows:
            if not r.ok:
                return r
        return None


def check_product_bound(sizes, levels, eps_scale=Fraction(1)) -> BoundReport:
    """Exact check that the stem product below each level stays within
    1/epsilon: product(sizes[:stem]) * epsilon <= 1 in rational arithmetic."""
    rows = []
    for i, (stem, eps) in enumerate(levels):
        eps = Fraction(eps) * Fraction(eps_scale)
        product = math.prod(sizes[:stem])
        rows.append(BoundRow(i, stem, product, eps, product * eps <= 1))
    return BoundReport(rows)


def random_condition(maps: SplitMaps, stem_bound_index: int, horizon: int, rng: random.Random) -> Condition:
    """A random stem-aligned condition over the full coordinate axis."""
    stem_len = maps.bounds[stem_bound_index]
    w = tuple(rng.randrange(maps.sizes[n]) for n in range(stem_len))
    creatures = []
    for n in range(stem_len, min(stem_len + horizon, maps.horizon)):
        values = list(range(maps.sizes[n]))
        size = rng.randint(1, len(values))
        chosen = frozenset(rng.sample(values, size))
        creatures.append(Creature(n, n + 1, float(size), (chosen,)))
    return Condition(w, tuple(creatures))
