"""
Subset-valued probabilities
===========================

A transition probability here is a subset of ``[0, 1]`` rather than a
number.  :class:`SubsetProb` stores such a subset as a finite union of
closed intervals with exact rational endpoints.  Points are degenerate
intervals, so ordinary probabilities are the singletons ``{x}``.

The representation is closed under reflection ``1 - A``, the pointwise
product ``B . C`` and union, and equality is structural on the canonical
form (sorted, disjoint, non-touching intervals).
"""
from __future__ import annotations

import re
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Tuple, Union

from .errors import EmptySubset, OutOfUnitInterval

__all__ = [
    "SubsetProb",
    "canonicalize",
    "one_minus",
    "product",
    "union",
    "to_fraction",
    "format_fraction",
]

RationalLike = Union[Fraction, int, float, str, Decimal]

_RATIO = re.compile(r"^\s*[+-]?\d+\s*/\s*\d+\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?\d+(\.\d{1,12})?\s*$")


def to_fraction(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Strings must be ``"num/den"`` or a decimal literal with at most twelve
    fractional digits.  Floats are converted exactly (binary floats are
    dyadic rationals), so ``to_fraction(0.1) != Fraction(1, 10)``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, (int, float, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        if _RATIO.match(value):
            num, den = value.split("/")
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        if _DECIMAL.match(value):
            return Fraction(value.strip())
        raise ValueError(f"not a rational literal: {value!r}")
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_fraction(x: Fraction) -> str:
    return str(x)


Interval = Tuple[Fraction, Fraction]


def _merge(raw: Iterable) -> Tuple[Interval, ...]:
    pairs = []
    for item in raw:
        if isinstance(item, (tuple, list)) and len(item) == 2:
            lo, hi = to_fraction(item[0]), to_fraction(item[1])
        else:
            lo = hi = to_fraction(item)
        if lo > hi:
            raise ValueError(f"interval with lo > hi: ({lo}, {hi})")
        if lo < 0 or hi > 1:
            raise OutOfUnitInterval(f"({lo}, {hi}) is not inside [0, 1]")
        pairs.append((lo, hi))
    if not pairs:
        raise EmptySubset("a subset probability must be nonempty")
    pairs.sort()
    merged = [pairs[0]]
    for lo, hi in pairs[1:]:
        last_lo, last_hi = merged[-1]
        # closed intervals: touching endpoints already share a point
        if lo <= last_hi:
            if hi > last_hi:
                merged[-1] = (last_lo, hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


class SubsetProb:
    """Nonempty finite union of closed rational subintervals of ``[0, 1]``.

    Instances are immutable and hashable.  The constructor accepts any
    iterable of ``(lo, hi)`` pairs or bare points and canonicalizes it.

    >>> SubsetProb([("1/5", "1/2"), ("1/2", "7/10")])
    SubsetProb('[1/5,7/10]')
    """

    __slots__ = ("_intervals", "_hash")

    def __init__(self, intervals: Iterable):
        object.__setattr__(self, "_intervals", _merge(intervals))
        object.__setattr__(self, "_hash", hash(self._intervals))

    def __setattr__(self, name, value):
        raise AttributeError("SubsetProb is immutable")

    @classmethod
    def point(cls, x: RationalLike) -> "SubsetProb":
        return cls([(x, x)])

    @classmethod
    def interval(cls, lo: RationalLike, hi: RationalLike) -> "SubsetProb":
        return cls([(lo, hi)])

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._intervals

    # predicates -------------------------------------------------------
    @property
    def is_null(self) -> bool:
        """True iff this is exactly ``{0}``."""
        return self._intervals == ((0, 0),)

    @property
    def is_certain(self) -> bool:
        """True iff this is exactly ``{1}``."""
        return self._intervals == ((1, 1),)

    @property
    def is_singleton(self) -> bool:
        return len(self._intervals) == 1 and self._intervals[0][0] == self._intervals[0][1]

    @property
    def value(self) -> Fraction:
        """The number ``x`` of a singleton ``{x}``."""
        if not self.is_singleton:
            raise ValueError(f"{self} is not a singleton")
        return self._intervals[0][0]

    def contains(self, x: RationalLike) -> bool:
        x = to_fraction(x)
        return any(lo <= x <= hi for lo, hi in self._intervals)

    __contains__ = contains

    # algebra ----------------------------------------------------------
    def one_minus(self) -> "SubsetProb":
        return SubsetProb((1 - hi, 1 - lo) for lo, hi in self._intervals)

    def __mul__(self, other: "SubsetProb") -> "SubsetProb":
        if not isinstance(other, SubsetProb):
            return NotImplemented
        # all endpoints are nonnegative, so [a,b].[c,d] = [ac, bd]
        return SubsetProb(
            (a * c, b * d) for a, b in self._intervals for c, d in other._intervals
        )

    def __or__(self, other: "SubsetProb") -> "SubsetProb":
        if not isinstance(other, SubsetProb):
            return NotImplemented
        return SubsetProb(self._intervals + other._intervals)

    def __rsub__(self, other):
        if other == 1:
            return self.one_minus()
        return NotImplemented

    # plumbing ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, SubsetProb):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self):
        return self._hash

    def __str__(self):
        parts = []
        for lo, hi in self._intervals:
            parts.append(f"{{{lo}}}" if lo == hi else f"[{lo},{hi}]")
        return " u ".join(parts)

    def __repr__(self):
        return f"SubsetProb({str(self)!r})"

    def to_json(self) -> list:
        return [[format_fraction(lo), format_fraction(hi)] for lo, hi in self._intervals]

    @classmethod
    def from_json(cls, data) -> "SubsetProb":
        if isinstance(data, (str, int)):
            return cls.point(data)
        return cls(data)


ZERO = SubsetProb.point(0)
ONE = SubsetProb.point(1)
SubsetProb.ZERO = ZERO  # type: ignore[attr-defined]
SubsetProb.ONE = ONE  # type: ignore[attr-defined]


def canonicalize(raw_intervals: Iterable) -> SubsetProb:
    return SubsetProb(raw_intervals)


def one_minus(a: SubsetProb) -> SubsetProb:
    return a.one_minus()


def product(b: SubsetProb, c: SubsetProb) -> SubsetProb:
    return b * c


def union(*values: SubsetProb) -> SubsetProb:
    if not values:
        raise EmptySubset("union of no subset probabilities")
    out = values[0]
    for v in values[1:]:
        out = out | v
    return out
