"""Exact evaluation of the tower norm and checks of its drop identities.

Cardinalities are carried in double-log space: a `LogLogCard` with exponent
lambda stands for the set size 2^(2^lambda).  The norm depends only on
lambda, so the astronomically large thresholds never need materializing.
Regime tests are exact rational comparisons; logarithms are evaluated with
256-bit mpmath arithmetic and reported to double precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

import mpmath

PRECISION_BITS = 256
EQUALITY_TOL = 1e-9
INEQUALITY_SLACK = 1e-9

RationalLike = "Fraction | int"


@dataclass(frozen=True)
class LogLogCard:
    """A symbolic set size x = 2^(2^lam), carried as the exact exponent lam."""

    lam: Fraction

    def __post_init__(self):
        lam = Fraction(self.lam)
        if lam < 0:
            raise ValueError("double-log exponent must be nonnegative")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_tower(cls, exponent) -> "LogLogCard":
        return cls(Fraction(exponent))

    @classmethod
    def from_size(cls, n: int) -> "LogLogCard":
        """Exact only when log2(log2(n)) is dyadic; n must be >= 2."""
        if n < 2:
            raise ValueError("size must be at least 2")
        inner = math.log2(n)
        return cls(Fraction(math.log2(inner)).limit_denominator(1 << 30))


@lru_cache(maxsize=None)
def _log2_fraction(num: int, den: int) -> mpmath.mpf:
    with mpmath.workprec(PRECISION_BITS):
        return mpmath.log(mpmath.mpf(num) / den) / mpmath.log(2)


def _log2(x: Fraction) -> mpmath.mpf:
    return _log2_fraction(x.numerator, x.denominator)


def _as_fraction(x) -> Fraction:
    if isinstance(x, LogLogCard):
        return x.lam
    return Fraction(x)


def tower_norm(lam, drop=0, k: int = 1) -> float:
    """Norm of a set of size 2^(2^lam) at drop index `drop` with divisor k.

    Equals log2(lam - drop) / k when lam - drop >= 2, else 1.  The regime
    test is exact; the logarithm is evaluated at 256 bits.
    """
    if k < 1:
        raise ValueError("norm divisor k must be a positive integer")
    lam = _as_fraction(lam)
    drop = _as_fraction(drop)
    if drop < 0:
        raise ValueError("drop index must be nonnegative")
    if lam - drop >= 2:
        return float(_log2(lam - drop) / k)
    return 1.0


def _halved_lam(lam: Fraction) -> mpmath.mpf:
    """log2(2^lam - 1): the double-log exponent of x/2."""
    with mpmath.workprec(PRECISION_BITS):
        lamf = mpmath.mpf(lam.numerator) / lam.denominator
        return lamf + mpmath.log1p(-mpmath.power(2, -lamf)) / mpmath.log(2)


def _norm_mpf(lam, drop, k: int) -> mpmath.mpf:
    """tower_norm on a possibly irrational lambda (mpf), same branch rule."""
    with mpmath.workprec(PRECISION_BITS):
        gap = mpmath.mpf(lam) - mpmath.mpf(drop)
        if gap >= 2:
            return mpmath.log(gap) / mpmath.log(2) / k
        return mpmath.mpf(1)


@dataclass(frozen=True)
class NormCheckRow:
    clause: int
    lam: Fraction
    drop: Fraction
    k: int
    lhs: float
    rhs: float
    ok: bool
    note: str = ""


@dataclass
class NormCheckReport:
    rows: list[NormCheckRow]

    @property
    def checked(self) -> int:
        return len(self.rows)

    @property
    def violations(self) -> list[NormCheckRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.violations


def _ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def verify_norm_identities(
    lams,
    drops,
    ks,
    y_lams=None,
    clauses=(1, 2, 3, 4),
    tol: float = EQUALITY_TOL,
) -> NormCheckReport:
    """Check the four norm-drop identities over a parameter grid.

    Clause 1: halving the set costs at most 1/k of norm.
    Clause 2: moving the drop index to the midpoint costs exactly 1/k
              (requires norm >= 2).
    Clause 3: any y whose norm at the midpoint drop stays above 1 has
              norm(y, i) within 1/k of norm(x, i).
    Clause 4: the set of double-log size equal to the midpoint loses
              exactly 1/k (requires lam >= 4 + drop).
    """
    lams = [_as_fraction(x) for x in lams]
    drops = [_as_fraction(x) for x in drops]
    y_lams = lams[::8] if y_lams is None else [_as_fraction(x) for x in y_lams]
    rows: list[NormCheckRow] = []
    with mpmath.workprec(PRECISION_BITS):
        for lam in lams:
            for drop in drops:
                if drop < 0 or drop > lam:
                    continue
                for k in ks:
                    base = tower_norm(lam, drop, k)
                    if 1 in clauses:
                        half_lam = _halved_lam(lam)
                        lhs = float(_norm_mpf(half_lam, mpmath.mpf(drop.numerator) / drop.denominator, k))
                        rhs = base - 1.0 / k
                        rows.append(
                            NormCheckRow(1, lam, drop, k, lhs, rhs, lhs >= rhs - INEQUALITY_SLACK)
                        )
                    j = (lam + drop) / 2
                    if 2 in clauses and lam - drop >= 2 ** (2 * k):
                        lhs = tower_norm(lam, j, k)
                        rhs = base - 1.0 / k
                        rows.append(
                            NormCheckRow(2, lam, drop, k, lhs, rhs, abs(lhs - rhs) <= tol)
                        )
                    if 3 in clauses:
                        for lam_y in y_lams:
                            if tower_norm(lam_y, j, k) <= 1 or base <= 1:
                                continue
                            if lam_y - j < 2 or lam - drop < 2:
                                continue
                            lhs = tower_norm(lam_y, drop, k)
                            rhs = base - 1.0 / k
                            rows.append(
                                NormCheckRow(
                                    3, lam, drop, k, lhs, rhs,
                                    lhs >= rhs - INEQUALITY_SLACK, note=f"lam_y={lam_y}",
                                )
                            )
                    if 4 in clauses and lam >= 4 + drop:
                        lhs = tower_norm(j, drop, k)
                        rhs = base - 1.0 / k
                        rows.append(
                            NormCheckRow(4, lam, drop, k, lhs, rhs, abs(lhs - rhs) <= tol)
                        )
    return NormCheckReport(rows)


def default_grid():
    """A grid of more than 10^4 admissible (lambda, drop, k) points."""
    lams = [Fraction(v) for v in range(18, 1025, 16)] + [
        Fraction(2) ** e for e in range(5, 11)
    ]
    drops = [Fraction(v) for v in range(0, 11)] + [Fraction(1, 2), Fraction(7, 2)]
    ks = list(range(1, 17))
    return lams, drops, ks


def slot_norm_divisor(lam, threshold=16) -> int:
    """The per-slot norm divisor: 2 below the threshold, else
    floor(sqrt(max k with norm(lam, 0, k) > 1))."""
    lam = _as_fraction(lam)
    threshold = _as_fraction(threshold)
    if lam <= threshold:
        return 2
    # norm(lam, 0, k) > 1  iff  2^k < lam; the max k is exact.
    k = 1
    while Fraction(2) ** (k + 1) < lam:
        k += 1
    return math.isqrt(k)
