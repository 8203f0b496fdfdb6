"""Creatures, creating pairs, and finite-horizon conditions.

Everything here is a finite combinatorial approximation.  A condition is a
stem plus finitely many creatures; beyond its horizon it is read as if it
continued with full creatures (all values allowed).  All objects are
immutable and every operation is a pure function.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

DEFAULT_BUDGET = 1_000_000


class BudgetError(RuntimeError):
    """Raised when an enumeration would exceed the configured budget."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(
            f"enumeration needs about {estimate} items but the budget is {budget}"
        )
        self.estimate = estimate
        self.budget = budget


class AlignmentError(ValueError):
    """Creatures or stems do not line up with the required coordinates."""


@dataclass(frozen=True)
class SlotSpace:
    """Finite value spaces per coordinate; slot m carries values 0..sizes[m]-1."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if any(s < 2 for s in self.sizes):
            raise ValueError("every slot needs at least two values")

    def __len__(self) -> int:
        return len(self.sizes)

    def slot(self, m: int) -> range:
        return range(self.sizes[m])

    def product(self, lo: int, hi: int) -> int:
        return math.prod(self.sizes[lo:hi])


@dataclass(frozen=True)
class Creature:
    """Forgetful product creature: one value set per covered slot.

    `parts` records the constituents when the creature arose as a sum.
    """

    m_dn: int
    m_up: int
    nor: float
    sets: tuple[frozenset[int], ...]
    parts: tuple["Creature", ...] | None = None

    def __post_init__(self):
        if not self.m_dn < self.m_up:
            raise AlignmentError("m_dn must be below m_up")
        if len(self.sets) != self.m_up - self.m_dn:
            raise AlignmentError("need exactly one value set per covered slot")
        if any(not s for s in self.sets):
            raise ValueError("value sets must be nonempty")

    @property
    def width(self) -> int:
        return self.m_up - self.m_dn

    def set_at(self, m: int) -> frozenset[int]:
        if not self.m_dn <= m < self.m_up:
            raise AlignmentError(f"slot {m} outside [{self.m_dn}, {self.m_up})")
        return self.sets[m - self.m_dn]

    def pos_count(self) -> int:
        return math.prod(len(s) for s in self.sets)


def _nonempty_subsets(values) -> list[frozenset[int]]:
    vals = sorted(values)
    out = []
    for k in range(1, len(vals) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(vals, k))
    return out


class CreatingPair:
    """A family of product-style creatures together with its refinement relation.

    Subclasses fix the slot alignment (span) and the norm rule.  Refinement
    is decided componentwise; enumeration refuses above a budget instead of
    silently truncating.
    """

    space: SlotSpace
    local = False

    def span(self, m_dn: int) -> int:
        raise NotImplementedError

    def norm_of_sets(self, m_dn: int, sets) -> float:
        raise NotImplementedError

    def make(self, m_dn: int, sets, parts=None) -> Creature:
        sets = tuple(frozenset(s) for s in sets)
        t = Creature(m_dn, self.span(m_dn), self.norm_of_sets(m_dn, sets), sets, parts)
        if not self.member(t):
            raise ValueError(f"not a member creature at slot {m_dn}: {sets}")
        return t

    def member(self, t: Creature) -> bool:
        if t.m_up != self.span(t.m_dn) or t.m_up > len(self.space):
            return False
        for m, s in zip(range(t.m_dn, t.m_up), t.sets):
            if not s or not s <= frozenset(self.space.slot(m)):
                return False
        return True

    def refines(self, s: Creature, t: Creature) -> bool:
        """True iff s is a permitted strengthening of t."""
        return (
            s.m_dn == t.m_dn
            and s.m_up == t.m_up
            and self.member(s)
            and self.member(t)
            and all(a <= b for a, b in zip(s.sets, t.sets))
        )

    def sigma_count(self, t: Creature) -> int:
        return math.prod(2 ** len(s) - 1 for s in t.sets)

    def sigma(self, t: Creature, budget: int = DEFAULT_BUDGET) -> list[Creature]:
        """All permitted strengthenings of t, refusing above the budget."""
        est = self.sigma_count(t)
        if est > budget:
            raise BudgetError(est, budget)
        choices = [_nonempty_subsets(s) for s in t.sets]
        return [self.make(t.m_dn, combo) for combo in itertools.product(*choices)]

    def full_creature(self, m_dn: int) -> Creature:
        hi = self.span(m_dn)
        return self.make(m_dn, [frozenset(self.space.slot(m)) for m in range(m_dn, hi)])

    def creature_count(self, m_dn: int) -> int:
        hi = self.span(m_dn)
        return math.prod(2 ** self.space.sizes[m] - 1 for m in range(m_dn, hi))

    def enumerate_creatures(self, m_dn: int, budget: int = DEFAULT_BUDGET) -> list[Creature]:
        est = self.creature_count(m_dn)
        if est > budget:
            raise BudgetError(est, budget)
        hi = self.span(m_dn)
        choices = [_nonempty_subsets(self.space.slot(m)) for m in range(m_dn, hi)]
        return [self.make(m_dn, combo) for combo in itertools.product(*choices)]


def _size_norm(n: int) -> float:
    return float(n)


def _log2_size_norm(n: int) -> float:
    return math.log2(n)


NORM_RULES = {"size": _size_norm, "log2size": _log2_size_norm}


class SizeNormPair(CreatingPair):
    """Local pair: a creature at slot m is a nonempty value subset A, norm g(|A|)."""

    local = True

    def __init__(self, space: SlotSpace, norm_rule: str = "size"):
        self.space = space
        self.norm_rule = norm_rule
        self._g = NORM_RULES[norm_rule]

    def span(self, m_dn: int) -> int:
        return m_dn + 1

    def norm_of_sets(self, m_dn: int, sets) -> float:
        return float(self._g(len(sets[0])))


class BlockPair(CreatingPair):
    """Block-aligned pair: per-coordinate value sets on one block, norm = min size."""

    local = False

    def __init__(self, space: SlotSpace, boundaries):
        boundaries = tuple(boundaries)
        if not boundaries or boundaries[0] != 0:
            raise ValueError("block boundaries must start at 0")
        if any(b >= c for b, c in zip(boundaries, boundaries[1:])):
            raise ValueError("block boundaries must be strictly increasing")
        if boundaries[-1] > len(space):
            raise ValueError("blocks exceed the slot space")
        self.space = space
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

    def norm_of_sets(self, m_dn: int, sets) -> float:
        return float(min(len(s) for s in sets))


def _check_aligned(w, creatures) -> int:
    at = len(w)
    for t in creatures:
        if t.m_dn != at:
            raise AlignmentError(f"creature starts at {t.m_dn}, expected {at}")
        at = t.m_up
    return at


def pos_product(w, creatures, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """All extensions of the stem w through the given consecutive creatures."""
    creatures = tuple(creatures)
    _check_aligned(w, creatures)
    est = math.prod(t.pos_count() for t in creatures)
    if est > budget:
        raise BudgetError(est, budget)
    cols = [sorted(s) for t in creatures for s in t.sets]
    base = tuple(w)
    return [base + combo for combo in itertools.product(*cols)]


def pos_contains(w, creatures, v) -> bool:
    """Membership in pos_product without enumerating it."""
    creatures = tuple(creatures)
    end = _check_aligned(w, creatures)
    v = tuple(v)
    if len(v) != end or v[: len(w)] != tuple(w):
        return False
    idx = len(w)
    for t in creatures:
        for s in t.sets:
            if v[idx] not in s:
                return False
            idx += 1
    return True


@dataclass(frozen=True)
class Condition:
    """Finite-horizon condition: stem w plus consecutive creatures."""

    w: tuple[int, ...]
    creatures: tuple[Creature, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(self.w))
        object.__setattr__(self, "creatures", tuple(self.creatures))
        _check_aligned(self.w, self.creatures)

    @property
    def stem_len(self) -> int:
        return len(self.w)

    @property
    def horizon_end(self) -> int:
        return self.creatures[-1].m_up if self.creatures else len(self.w)

    def creature_at(self, m_dn: int) -> Creature | None:
        for t in self.creatures:
            if t.m_dn == m_dn:
                return t
        return None


def validate_condition(pair: CreatingPair, p: Condition) -> None:
    for m, v in enumerate(p.w):
        if v not in pair.space.slot(m):
            raise ValueError(f"stem value {v} out of range at slot {m}")
    for t in p.creatures:
        if not pair.member(t):
            raise ValueError(f"creature at slot {t.m_dn} is not in the pair")


def leq(pair: CreatingPair, p: Condition, q: Condition) -> bool:
    """True iff q strengthens p (tail convention fills both horizons)."""
    lw_p, lw_q = len(p.w), len(q.w)
    if lw_q < lw_p:
        return False
    # q's stem must end on a creature boundary of p (or beyond p's horizon,
    # on a span boundary of the tail).
    ends = [lw_p] + [t.m_up for t in p.creatures]
    if lw_q not in ends:
        if lw_q <= p.horizon_end:
            return False
        at = p.horizon_end
        while at < lw_q:
            at = pair.span(at)
        if at != lw_q:
            return False
    if q.w[:lw_p] != p.w:
        return False
    # stem values chosen through p's creatures (or its full tail)
    for m in range(lw_p, lw_q):
        if m < p.horizon_end:
            covering = next(t for t in p.creatures if t.m_dn <= m < t.m_up)
            if q.w[m] not in covering.set_at(m):
                return False
        else:
            if q.w[m] not in pair.space.slot(m):
                return False
    # componentwise refinement up to the larger horizon
    slot = lw_q
    end = max(p.horizon_end, q.horizon_end)
    while slot < end:
        s = q.creature_at(slot) or pair.full_creature(slot)
        if slot < p.horizon_end:
            t = p.creature_at(slot)
            if t is None:
                return False
        else:
            t = pair.full_creature(slot)
        if not pair.refines(s, t):
            return False
        slot = s.m_up
    return True


@dataclass
class LawReport:
    name: str
    checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class GoodPairReport:
    laws: list[LawReport]

    @property
    def ok(self) -> bool:
        return all(law.ok for law in self.laws)

    @property
    def checked(self) -> int:
        return sum(law.checked for law in self.laws)

    @property
    def failed(self) -> int:
        return sum(len(law.failures) for law in self.laws)

    def first_failure(self) -> str | None:
        for law in self.laws:
            if law.failures:
                return f"{law.name}: {law.failures[0]}"
        return None


def check_good_pair(pair: CreatingPair, start_slots, budget: int = DEFAULT_BUDGET) -> GoodPairReport:
    """Exhaustively check the good-pair laws at the given start slots."""
    fullness = LawReport("fullness", 0, [])
    reflexivity = LawReport("reflexivity", 0, [])
    monotone = LawReport("pos-monotonicity", 0, [])
    transitive = LawReport("transitivity", 0, [])
    sigma_cache: dict[Creature, list[Creature]] = {}

    def sigma_of(t):
        if t not in sigma_cache:
            sigma_cache[t] = pair.sigma(t, budget)
        return sigma_cache[t]

    for m in start_slots:
        est = pair.creature_count(m)
        if est * est > budget:
            raise BudgetError(est * est, budget)
        for t in pair.enumerate_creatures(m, budget):
            fullness.checked += 1
            if any(not s for s in t.sets):
                fullness.failures.append(f"slot {m}: empty possibility set")
            st = sigma_of(t)
            sset = set(st)
            reflexivity.checked += 1
            if t not in sset:
                reflexivity.failures.append(f"slot {m}: t not in sigma(t) for {t.sets}")
            for s in st:
                monotone.checked += 1
                if not (
                    s.m_dn == t.m_dn
                    and s.m_up == t.m_up
                    and all(a <= b for a, b in zip(s.sets, t.sets))
                ):
                    monotone.failures.append(f"slot {m}: {s.sets} does not shrink {t.sets}")
                transitive.checked += 1
                if not set(sigma_of(s)) <= sset:
                    transitive.failures.append(
                        f"slot {m}: sigma({s.sets}) escapes sigma({t.sets})"
                    )
    return GoodPairReport([fullness, reflexivity, monotone, transitive])
