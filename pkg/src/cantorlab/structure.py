"""Level-n geometry of E_lambda, exact membership and the totally-self-similar test.

Level sets are built from the deduplicated origins ``f_w(0)`` of all words of
a given length.  For ``lambda = p/q`` every such origin is ``N / (q 3^n)`` for
an integer ``N``, and appending a digit maps ``N`` to ``3N + d'`` with
``d'`` in ``{0, p, 2q}``; the work happens on these integers.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import networkx as nx
import numpy as np

from ._guard import check_depth
from .errors import DomainError
from .numeric import (
    Digit,
    Interval,
    IntervalSet,
    RationalLike,
    as_rational,
    check_lambda,
    eval_word_interval,
    eval_word_origin,
)

DEFAULT_DEPTH_GUARD = 14
_INT64_SAFE = 2 ** 62


def _scaled_digits(lam: Fraction) -> tuple[int, int, int]:
    return 0, lam.numerator, 2 * lam.denominator


def _fits_int64(lam: Fraction, n: int) -> bool:
    return 3 * lam.denominator * 3 ** (n + 1) < _INT64_SAFE


@lru_cache(maxsize=256)
def origin_numerators(lam: Fraction, n: int) -> np.ndarray:
    """Sorted distinct ``N`` with ``f_w(0) = N/(q 3^n)`` over all words of length ``n``."""
    digits = _scaled_digits(lam)
    if _fits_int64(lam, n):
        cur = np.zeros(1, dtype=np.int64)
        d = np.array(digits, dtype=np.int64)
        for _ in range(n):
            cur = np.unique((3 * cur[:, None] + d[None, :]).ravel())
        return cur
    vals = {0}
    for _ in range(n):
        vals = {3 * v + dd for v in vals for dd in digits}
    return np.array(sorted(vals), dtype=object)


def lex_origin_numerators(lam: Fraction, n: int) -> np.ndarray:
    """Origins of all ``3^n`` words of length ``n``, indexed by lexicographic rank."""
    digits = np.array(_scaled_digits(lam), dtype=np.int64 if _fits_int64(lam, n) else object)
    cur = np.zeros(1, dtype=digits.dtype)
    for _ in range(n):
        cur = (3 * cur[:, None] + digits[None, :]).ravel()
    return cur


def word_from_rank(rank: int, n: int) -> tuple[Digit, ...]:
    out = []
    for _ in range(n):
        rank, r = divmod(rank, 3)
        out.append(Digit(r))
    return tuple(reversed(out))


def _closed_components(starts: np.ndarray, width: int):
    """Merge equal-width closed intervals ``[s, s+width]`` given sorted ``starts``."""
    if len(starts) == 0:
        return []
    gaps = np.nonzero(np.diff(starts) > width)[0]
    lo_idx = np.concatenate(([0], gaps + 1))
    hi_idx = np.concatenate((gaps, [len(starts) - 1]))
    return [(int(starts[a]), int(starts[b]) + width) for a, b in zip(lo_idx, hi_idx)]


def _set_from_components(components, den: int, lo_open: bool, hi_open: bool) -> IntervalSet:
    lo_side = 1 if lo_open else 0
    hi_side = 0 if hi_open else 1
    ranges = [((Fraction(a, den), lo_side), (Fraction(b, den), hi_side)) for a, b in components]
    return IntervalSet._from_ranges(ranges)


@lru_cache(maxsize=256)
def level_components(lam: Fraction, n: int) -> tuple[list, int]:
    """Components of ``I_n`` as integer pairs over the common denominator ``q 3^n``."""
    starts = origin_numerators(lam, n)
    return _closed_components(starts, lam.denominator), lam.denominator * 3 ** n


def level_set(lam: RationalLike, n: int) -> IntervalSet:
    """``I_n``: the union of all n-level basic intervals ``f_w([0,1])``."""
    lam = check_lambda(lam)
    check_depth(n, DEFAULT_DEPTH_GUARD, "level_set")
    comps, den = level_components(lam, n)
    return _set_from_components(comps, den, False, False)


def hole_set(lam: RationalLike, n: int) -> IntervalSet:
    """``H_n``: the union of the images ``f_w(H)`` of the open hole ``H = ((1+lambda)/3, 2/3)``."""
    lam = check_lambda(lam)
    check_depth(n, DEFAULT_DEPTH_GUARD, "hole_set")
    p, q = lam.numerator, lam.denominator
    starts = origin_numerators(lam, n)
    # units of 1/(q 3^(n+1)): f_w(H) = (3N + q + p, 3N + 2q)
    los = 3 * starts + (q + p)
    his = 3 * starts + 2 * q
    comps = []
    for a, b in zip(los.tolist(), his.tolist()):
        if comps and a < comps[-1][1]:
            comps[-1] = (comps[-1][0], max(comps[-1][1], b))
        else:
            comps.append((a, b))
    return _set_from_components(comps, q * 3 ** (n + 1), True, True)


def primary_hole(lam: RationalLike) -> Interval:
    lam = check_lambda(lam)
    return Interval.open((1 + lam) / 3, Fraction(2, 3))


@dataclass(frozen=True)
class LevelGeometry:
    n: int
    lam: Fraction
    basic: IntervalSet
    holes: IntervalSet


def level_geometry(lam: RationalLike, n: int) -> LevelGeometry:
    lam = check_lambda(lam)
    return LevelGeometry(n, lam, level_set(lam, n), hole_set(lam, n))


# -- totally self-similar -----------------------------------------------------

def tss_exact(lam: RationalLike) -> tuple[bool, Optional[int]]:
    """Decide whether ``lam = 1 - 3^-m`` for a positive integer ``m``; return ``(flag, m)``."""
    lam = check_lambda(lam)
    gap = 1 - lam
    if gap.numerator != 1:
        return False, None
    den, m = gap.denominator, 0
    while den % 3 == 0:
        den //= 3
        m += 1
    if den == 1 and m >= 1:
        return True, m
    return False, None


@dataclass(frozen=True)
class TssWitness:
    n: int
    i: tuple[Digit, ...]
    j: tuple[Digit, ...]
    overlap: Interval


@dataclass(frozen=True)
class TssReport:
    verdict: bool
    depth: int
    fail_depth: Optional[int] = None
    witness: Optional[TssWitness] = None


def _depth_witness(lam: Fraction, n: int) -> TssWitness:
    """Lexicographically least ``(i, j)``, ``|i| = n``, ``|j| = n+1``, with ``f_i(H)`` meeting ``f_j(I)``."""
    p, q = lam.numerator, lam.denominator
    hole_origins = lex_origin_numerators(lam, n)
    basic_origins = lex_origin_numerators(lam, n + 1)
    # common unit 1/(q 3^(n+2))
    j_lo = 3 * basic_origins
    j_hi = j_lo + 3 * q
    for rank_i, origin in enumerate(hole_origins.tolist()):
        a = 9 * origin + 3 * (q + p)
        b = 9 * origin + 6 * q
        hits = np.nonzero((j_lo < b) & (j_hi > a))[0]
        if len(hits):
            rank_j = int(hits[0])
            c, d = int(j_lo[rank_j]), int(j_hi[rank_j])
            den = q * 3 ** (n + 2)
            lo, lo_open = (Fraction(a, den), True) if a >= c else (Fraction(c, den), False)
            hi, hi_open = (Fraction(b, den), True) if b <= d else (Fraction(d, den), False)
            return TssWitness(n, word_from_rank(rank_i, n), word_from_rank(rank_j, n + 1),
                              Interval(lo, hi, lo_open, hi_open))
    raise AssertionError("H_n meets I_{n+1} but no word pair overlaps")


def tss_check_depth(lam: RationalLike, depth: int) -> TssReport:
    """Check ``H_n ∩ I_{n+1} = ∅`` for every ``n <= depth``.

    Passing is only evidence; failure is a proof of non-total-self-similarity
    and comes with the least failing ``n`` and a lexicographically least
    overlapping word pair.
    """
    lam = check_lambda(lam)
    check_depth(depth + 1, DEFAULT_DEPTH_GUARD, "tss_check_depth")
    for n in range(depth + 1):
        if hole_set(lam, n) & level_set(lam, n + 1):
            return TssReport(False, depth, n, _depth_witness(lam, n))
    return TssReport(True, depth)


def tss_witness(lam: RationalLike) -> tuple[int, tuple[Digit, ...], tuple[Digit, ...]]:
    """For non-TSS ``lam`` in ``(1-3^-k, 1-3^-(k+1))`` return ``(k, Z T^k, L Z^k)``.

    ``f_{Z T^k}(H)`` then meets ``f_{L Z^k}(I)`` while the two maps differ.
    """
    lam = check_lambda(lam)
    if tss_exact(lam)[0]:
        raise DomainError(f"lambda = {lam} is of the form 1 - 3^-m; no witness exists")
    k = 0
    while not lam < 1 - Fraction(1, 3 ** (k + 1)):
        k += 1
    return k, (Digit.Z,) + (Digit.T,) * k, (Digit.L,) + (Digit.Z,) * k


def witness_overlap(lam: RationalLike, i, j) -> IntervalSet:
    """``f_i(H) ∩ f_j(I)`` for words of equal length."""
    lam = check_lambda(lam)
    origin = eval_word_origin(i, lam)
    scale = Fraction(1, 3 ** len(i))
    hole = primary_hole(lam)
    image = Interval.open(origin + scale * hole.lo, origin + scale * hole.hi)
    return IntervalSet([image]) & IntervalSet([eval_word_interval(j, lam)])


# -- membership ---------------------------------------------------------------

@dataclass
class MembershipAutomaton:
    """States ``r`` in ``[0, 1]`` with edges ``r --d--> 3r - value(d)`` kept inside ``[0, 1]``.

    Infinite paths from ``initial`` are exactly the codings of ``initial``.
    """

    initial: Fraction
    lam: Fraction
    graph: nx.DiGraph = field(repr=False)

    @property
    def states(self) -> set:
        return set(self.graph.nodes)

    def successors(self, r: Fraction):
        return [(self.graph.edges[r, s]["digit"], s) for s in self.graph.successors(r)]


def membership_automaton(x: RationalLike, lam: RationalLike) -> MembershipAutomaton:
    x = as_rational(x)
    lam = check_lambda(lam)
    graph = nx.DiGraph()
    if not 0 <= x <= 1:
        return MembershipAutomaton(x, lam, graph)
    graph.add_node(x)
    queue = deque([x])
    while queue:
        r = queue.popleft()
        for d in Digit:
            nxt = 3 * r - d.value(lam)
            if 0 <= nxt <= 1:
                if nxt not in graph:
                    graph.add_node(nxt)
                    queue.append(nxt)
                graph.add_edge(r, nxt, digit=d)
    return MembershipAutomaton(x, lam, graph)


def membership_exact(x: RationalLike, lam: RationalLike) -> bool:
    """Decide ``x in E_lambda`` exactly for rational ``x`` and ``lambda``.

    The automaton is finite and every node is reachable from ``x``, so an
    infinite path (a coding) exists iff the graph has a cycle.
    """
    auto = membership_automaton(x, lam)
    if auto.graph.number_of_nodes() == 0:
        return False
    return not nx.is_directed_acyclic_graph(auto.graph)


def box_dim_estimate(lam: RationalLike, n: int) -> float:
    """``log(count) / (n log 3)`` where ``count`` is the number of closed triadic
    grid cells of width ``3^-n`` meeting ``I_n``."""
    lam = check_lambda(lam)
    if n < 1:
        raise ValueError("box_dim_estimate needs n >= 1")
    check_depth(n, DEFAULT_DEPTH_GUARD, "box_dim_estimate")
    comps, _ = level_components(lam, n)
    q = lam.denominator
    cells = 3 ** n
    count = 0
    last = -1
    for a, b in comps:
        first = max(-(-a // q) - 1, 0, last + 1)
        final = min(b // q, cells - 1)
        if final >= first:
            count += final - first + 1
            last = final
    return math.log(count) / (n * math.log(3))
