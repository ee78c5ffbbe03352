"""Exact scalars, digit words and rational interval sets.

Everything here is exact: scalars are :class:`fractions.Fraction`, and
intervals carry their open/closed endpoint flags explicitly.  A finite word
``w = d_1 ... d_n`` over the digits ``Z, L, T`` names the composed map
``f_w = f_{d_1} o ... o f_{d_n}`` with ``f_d(x) = (x + d) / 3`` and digit
values ``0, lambda, 2``.
"""
from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from decimal import Decimal
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import DomainError

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def rat(num: int, den: int = 1) -> Fraction:
    """Canonical rational ``num/den``; the sign is carried by the numerator.

    >>> rat(4, 6), rat(3, -9)
    (Fraction(2, 3), Fraction(-1, 3))
    """
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(num, den)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Floats are refused: a binary float is not the number the caller meant,
    and every exact routine here is equality-sensitive.
    """
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            p, _, q = text.partition("/")
            try:
                num, den = int(p), int(q)
            except ValueError:
                raise DomainError(f"malformed rational {value!r}") from None
            if den == 0:
                raise DomainError(f"zero denominator in {value!r}")
            return Fraction(num, den)
        try:
            return Fraction(int(text))
        except ValueError:
            raise DomainError(f"malformed rational {value!r}; expected p/q") from None
    raise DomainError(f"expected an exact rational, got {type(value).__name__}")


def check_lambda(lam: RationalLike) -> Fraction:
    lam = as_rational(lam)
    if not 0 < lam < 1:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    return lam


class Digit(IntEnum):
    """Abstract digit; ``Z``, ``L``, ``T`` stand for ``0``, ``lambda``, ``2``."""

    Z = 0
    L = 1
    T = 2

    def value(self, lam: Fraction) -> Fraction:
        if self is Digit.Z:
            return Fraction(0)
        if self is Digit.L:
            return lam
        return Fraction(2)

    def __str__(self) -> str:
        return self.name


Word = tuple  # tuple[Digit, ...]; the empty tuple is the identity map


def word(text: str | Iterable[Digit]) -> tuple[Digit, ...]:
    """Parse ``"ZTL"`` (or pass through a digit sequence) into a word."""
    if isinstance(text, str):
        text = text.strip()
        if text in ("", "e", "eps", "ε"):
            return ()
        try:
            return tuple(Digit[c] for c in text.upper())
        except KeyError:
            raise DomainError(f"word {text!r} must use only Z, L, T") from None
    return tuple(Digit(d) for d in text)


def word_str(w: Sequence[Digit]) -> str:
    return "".join(Digit(d).name for d in w) or "ε"


def words(n: int) -> Iterator[tuple[Digit, ...]]:
    """All words of length ``n`` in lexicographic order (Z < L < T)."""
    return itertools.product(Digit, repeat=n)


def eval_word_origin(w: Sequence[Digit], lam: RationalLike) -> Fraction:
    """``f_w(0) = sum_k value(d_k) 3^-k``."""
    lam = check_lambda(lam)
    acc = Fraction(0)
    # Horner from the innermost map outwards: f_d(x) = (x + d)/3
    for d in reversed(w):
        acc = (acc + Digit(d).value(lam)) / 3
    return acc


def eval_word_interval(w: Sequence[Digit], lam: RationalLike) -> "Interval":
    """The basic interval ``f_w([0, 1])``."""
    lo = eval_word_origin(w, lam)
    return Interval(lo, lo + Fraction(1, 3 ** len(w)))


# An endpoint is encoded as a cut: (x, 0) sits just below x, (x, 1) just above.
# Every interval is then a half-open range [start_cut, end_cut) on the cut line,
# which reduces open/closed bookkeeping to ordinary range arithmetic.
_Cut = tuple


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"interval with lo {self.lo} > hi {self.hi}")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise DomainError("a degenerate interval must be closed at both ends")

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(as_rational(lo), as_rational(hi))

    @classmethod
    def open(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(as_rational(lo), as_rational(hi), True, True)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def _cuts(self) -> tuple[_Cut, _Cut]:
        return (self.lo, 1 if self.lo_open else 0), (self.hi, 0 if self.hi_open else 1)

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        if self.lo_open:
            ok_lo = x > self.lo
        else:
            ok_lo = x >= self.lo
        if self.hi_open:
            return ok_lo and x < self.hi
        return ok_lo and x <= self.hi

    def __str__(self) -> str:
        return "{}{}, {}{}".format(
            "(" if self.lo_open else "[", self.lo, self.hi, ")" if self.hi_open else "]"
        )


def _interval_from_cuts(start: _Cut, end: _Cut) -> Interval:
    return Interval(start[0], end[0], start[1] == 1, end[1] == 0)


class IntervalSet:
    """A finite union of rational intervals in canonical form.

    The parts are sorted, pairwise disjoint, and never connected to each
    other, so two sets covering the same points compare equal.  The empty
    set has no parts.

    >>> a = IntervalSet([Interval.closed(0, Fraction(1, 3))])
    >>> b = IntervalSet([Interval.closed(Fraction(1, 3), Fraction(2, 3))])
    >>> str(a | b)
    '[0, 2/3]'
    """

    __slots__ = ("_ranges", "_starts")

    def __init__(self, parts: Iterable[Interval] = ()):
        self._set_ranges(_merge(sorted(p._cuts() for p in parts)))

    def _set_ranges(self, ranges):
        self._ranges = tuple(ranges)
        self._starts = [r[0] for r in self._ranges]

    @classmethod
    def _from_ranges(cls, ranges) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj._set_ranges(ranges)
        return obj

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    @property
    def parts(self) -> tuple[Interval, ...]:
        return tuple(_interval_from_cuts(s, e) for s, e in self._ranges)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self._ranges)

    def __bool__(self) -> bool:
        return bool(self._ranges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._ranges == other._ranges

    def __hash__(self) -> int:
        return hash(self._ranges)

    def __repr__(self) -> str:
        return f"IntervalSet({self})"

    def __str__(self) -> str:
        return " ∪ ".join(str(p) for p in self.parts) if self._ranges else "∅"

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        i = bisect_right(self._starts, (x, 0)) - 1
        return i >= 0 and self._ranges[i][1] >= (x, 1)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._from_ranges(_merge(sorted(self._ranges + other._ranges)))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self._ranges, other._ranges
        i = j = 0
        while i < len(a) and j < len(b):
            start = max(a[i][0], b[j][0])
            end = min(a[i][1], b[j][1])
            if start < end:
                out.append((start, end))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet._from_ranges(out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        b = other._ranges
        j = 0
        for start, end in self._ranges:
            while j < len(b) and b[j][1] <= start:
                j += 1
            k = j
            cur = start
            while k < len(b) and b[k][0] < end:
                if b[k][0] > cur:
                    out.append((cur, b[k][0]))
                cur = max(cur, b[k][1])
                k += 1
            if cur < end:
                out.append((cur, end))
        return IntervalSet._from_ranges(out)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def issubset(self, other: "IntervalSet") -> bool:
        return not (self - other)

    def measure(self) -> Fraction:
        return sum((p.width for p in self.parts), Fraction(0))


def _merge(ranges: Sequence[tuple[_Cut, _Cut]]) -> list:
    out: list = []
    for start, end in ranges:
        if not start < end:
            continue
        if out and start <= out[-1][1]:
            if end > out[-1][1]:
                out[-1] = (out[-1][0], end)
        else:
            out.append((start, end))
    return out


def interval_set_algebra(a: IntervalSet, b: IntervalSet, op: str) -> IntervalSet:
    """Dispatch ``union``, ``intersect`` or ``difference`` by name."""
    if op == "union":
        return a | b
    if op in ("intersect", "intersection"):
        return a & b
    if op == "difference":
        return a - b
    raise DomainError(f"unknown interval-set operation {op!r}")
