"""Exact spectrum of E_lambda for rational lambda.

The spectrum is the infimum of the nonzero values ``|sum_{i<n} c_i 3^i|`` with
``c_i`` in the difference set ``{0, ±lambda, ±(2-lambda), ±2}``.  Built from
the most significant digit down, such a sum evolves as ``v -> 3v + c``.  Once
``|v| > 1`` every successor satisfies ``|3v + c| >= 3|v| - 2 > |v|``, so a path
that leaves ``[-1, 1]`` never comes back.  Since the value sought is at most
``lambda < 1``, only the states in ``[-1, 1]`` matter.  Those states are
multiples of ``1/q`` for ``lambda = p/q``, so there are at most ``2q + 1`` of
them and a breadth-first search settles the infimum exactly.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._guard import check_depth
from .errors import DomainError, ScanExhaustedError
from .numeric import Digit, RationalLike, check_lambda, eval_word_origin, word_str

DEFAULT_BRUTE_GUARD = 64

# (c, i_digit, j_digit) with c = value(i_digit) - value(j_digit); order fixed by
# the ascending order of c for any lambda in (0, 1).
_DELTA_PAIRS = (
    ("-2", Digit.Z, Digit.T),
    ("-(2-l)", Digit.L, Digit.T),
    ("-l", Digit.Z, Digit.L),
    ("0", Digit.Z, Digit.Z),
    ("l", Digit.L, Digit.Z),
    ("2-l", Digit.T, Digit.L),
    ("2", Digit.T, Digit.Z),
)


def delta_set(lam: RationalLike) -> tuple[Fraction, ...]:
    """The seven differences ``Ω - Ω``, sorted ascending."""
    lam = check_lambda(lam)
    return tuple(sorted({a.value(lam) - b.value(lam) for a in Digit for b in Digit}))


def _scaled_deltas(lam: Fraction) -> list[tuple[int, Digit, Digit]]:
    p, q = lam.numerator, lam.denominator
    out = []
    for _, di, dj in _DELTA_PAIRS:
        # q * (value(di) - value(dj)) as an integer
        vi = (0, p, 2 * q)[di]
        vj = (0, p, 2 * q)[dj]
        out.append((vi - vj, di, dj))
    return out


@dataclass(frozen=True)
class OffsetGraph:
    """Reachable scaled offsets ``v`` (``|v| <= 1``) from the root ``0``.

    ``parent`` maps each non-root state to ``(previous state, i digit, j digit)``
    for the first breadth-first discovery.
    """

    lam: Fraction
    states: frozenset
    parent: dict

    def path(self, v: Fraction) -> tuple[tuple[Digit, ...], tuple[Digit, ...]]:
        """Word pair ``(i, j)`` with ``3^n (f_i(0) - f_j(0)) = v``."""
        i, j = [], []
        while v != 0:
            v, di, dj = self.parent[v]
            i.append(di)
            j.append(dj)
        return tuple(reversed(i)), tuple(reversed(j))


def _integer_bfs(lam: Fraction) -> dict[int, Optional[tuple[int, Digit, Digit]]]:
    """Scaled states ``V = q v`` mapped to their first-discovery parent (``None`` for the root)."""
    q = lam.denominator
    deltas = _scaled_deltas(lam)
    parent: dict[int, Optional[tuple[int, Digit, Digit]]] = {0: None}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for c, di, dj in deltas:
            nxt = 3 * v + c
            if -q <= nxt <= q and nxt not in parent:
                parent[nxt] = (v, di, dj)
                queue.append(nxt)
    return parent


def _integer_path(parent, v: int) -> tuple[tuple[Digit, ...], tuple[Digit, ...]]:
    i, j = [], []
    while v != 0:
        v, di, dj = parent[v]
        i.append(di)
        j.append(dj)
    return tuple(reversed(i)), tuple(reversed(j))


def offset_graph(lam: RationalLike) -> OffsetGraph:
    lam = check_lambda(lam)
    q = lam.denominator
    parent = _integer_bfs(lam)
    states = frozenset(Fraction(v, q) for v in parent)
    parent_frac = {Fraction(k, q): (Fraction(v, q), di, dj)
                   for k, (v, di, dj) in ((k, e) for k, e in parent.items() if e is not None)}
    return OffsetGraph(lam, states, parent_frac)


@dataclass(frozen=True)
class SpectrumResult:
    lam: Fraction
    value: Fraction
    witness_i: tuple[Digit, ...]
    witness_j: tuple[Digit, ...]
    witness_n: int
    state_count: int

    def __str__(self) -> str:
        return (f"l({self.lam}) = {self.value}  witness i={word_str(self.witness_i)} "
                f"j={word_str(self.witness_j)} n={self.witness_n}  states={self.state_count}")


def spectrum_exact(lam: RationalLike) -> SpectrumResult:
    """Exact spectrum with a witness pair ``3^n |f_i(0) - f_j(0)| = value``."""
    lam = check_lambda(lam)
    parent = _integer_bfs(lam)
    # minimum |v|; ties broken toward the positive state, which has the
    # negation-symmetric twin anyway
    best = min((v for v in parent if v != 0), key=lambda v: (abs(v), v < 0))
    i, j = _integer_path(parent, best)
    if best < 0:
        i, j = j, i
    return SpectrumResult(lam, Fraction(abs(best), lam.denominator), i, j, len(i), len(parent))


def spectrum_brute(lam: RationalLike, depth: int) -> Fraction:
    """Minimum nonzero ``|sum_{i<n} c_i 3^i|`` over all ``n <= depth``, by enumeration.

    Partial sums are enumerated level by level as a set of exact values;
    values with modulus above 3 are dropped since no completion can bring
    them back below 1.
    """
    lam = check_lambda(lam)
    if depth < 1:
        raise ValueError("spectrum_brute needs depth >= 1")
    check_depth(depth, DEFAULT_BRUTE_GUARD, "spectrum_brute")
    q = lam.denominator
    # work with q * s so that every partial sum is an integer
    deltas = sorted({c for c, _, _ in _scaled_deltas(lam)})
    best: Optional[int] = None
    level = {0}
    for _ in range(depth):
        level = {3 * s + c for s in level for c in deltas}
        level = {s for s in level if abs(s) <= 3 * q}
        for s in level:
            if s != 0 and (best is None or abs(s) < best):
                best = abs(s)
    assert best is not None
    return Fraction(best, q)


def greedy_triadic_expansion(lam: RationalLike, k: int) -> tuple[int, ...]:
    """First ``k`` digits of the greedy expansion of ``lam`` over ``{2, 0, -2}``.

    At each step the largest digit keeping the normalized remainder in
    ``[-1, 1]`` is taken.
    """
    lam = check_lambda(lam)
    digits = []
    r = lam
    for _ in range(k):
        for d in (2, 0, -2):
            if abs(3 * r - d) <= 1:
                digits.append(d)
                r = 3 * r - d
                break
    return tuple(digits)


def _normalized_remainders(lam: Fraction, k: int) -> list[Fraction]:
    """``rho[n] = 3^n (lam - sum_{m<=n} d_m 3^-m)`` for ``n = 0..k``."""
    rho = [lam]
    for d in greedy_triadic_expansion(lam, k):
        rho.append(3 * rho[-1] - d)
    return rho


def expansion_words(expansion, n: int) -> tuple[tuple[Digit, ...], tuple[Digit, ...]]:
    """Words ``i = L i_2..i_n``, ``j = Z j_2..j_n`` with ``j_k - i_k`` the (k-1)-th expansion digit."""
    i, j = [Digit.L], [Digit.Z]
    for k in range(2, n + 1):
        d = expansion[k - 2]
        if d == 0:
            i.append(Digit.Z)
            j.append(Digit.Z)
        elif d == 2:
            i.append(Digit.Z)
            j.append(Digit.T)
        else:
            i.append(Digit.T)
            j.append(Digit.Z)
    return tuple(i), tuple(j)


@dataclass(frozen=True)
class UpperBoundWitness:
    value: Fraction
    i: tuple[Digit, ...]
    j: tuple[Digit, ...]
    case: str
    position: int


def upper_bound_witness(lam: RationalLike, k: int) -> UpperBoundWitness:
    """A nonzero element of the spectrum's value set that is at most 1/2.

    The position ``N`` is chosen from the greedy expansion:

    * a ``0`` digit followed by a nonzero one (case A, and the first form of case B);
    * for an expansion ending in zeros, the last sign change before the zero tail (case B);
    * a digit equal to minus each of its next two (case C);
    * otherwise the start of an alternating ``2, -2`` tail (case C, value 1/2).

    Only the first ``k`` digits are examined.
    """
    lam = check_lambda(lam)
    if _is_tss(lam):
        raise DomainError(f"lambda = {lam} is totally self-similar; the bound 1/2 does not apply")
    exp = greedy_triadic_expansion(lam, k)
    rho = _normalized_remainders(lam, k)

    def build(n: int, case: str) -> UpperBoundWitness:
        i, j = expansion_words(exp, n)
        value = 3 ** n * abs(eval_word_origin(i, lam) - eval_word_origin(j, lam))
        if value != abs(rho[n - 1]) or not 0 < value <= Fraction(1, 2):
            raise AssertionError(f"construction at N={n} gave {value}")
        return UpperBoundWitness(value, i, j, case, n)

    # positions are 1-based: exp[N-1] is the N-th digit
    for n in range(1, k):
        if exp[n - 1] == 0 and exp[n] != 0:
            return build(n, "A")
    zero_at = next((n for n in range(k + 1) if rho[n] == 0), None)
    if zero_at is not None:
        for n in range(zero_at - 1, 0, -1):
            if exp[n - 1] != 0 and exp[n - 1] == -exp[n]:
                return build(n, "B")
    for n in range(1, k - 1):
        if exp[n - 1] != 0 and exp[n - 1] == -exp[n] == -exp[n + 1]:
            return build(n, "C")
    for n in range(1, k + 1):
        if abs(rho[n - 1]) == Fraction(1, 2):
            return build(n, "C-alternating")
    raise ScanExhaustedError(f"no qualifying position within the first {k} digits of {lam}")


def _is_tss(lam: Fraction) -> bool:
    gap = 1 - lam
    if gap.numerator != 1:
        return False
    den = gap.denominator
    while den % 3 == 0:
        den //= 3
    return den == 1


def rw_step(q: int, x: int) -> int:
    """One step of the digit-removal map x -> (2q ± x)/3 or x/3 on nonzero integers.

    Branches are tried in the order 2q + x, 2q - x, x; the first divisible by 3 wins.
    """
    if q < 1:
        raise DomainError("q must be a positive integer")
    if x == 0:
        raise DomainError("the map is defined on nonzero integers")
    for num in (2 * q + x, 2 * q - x, x):
        if num % 3 == 0:
            if num == 0:
                raise DomainError(f"branch yields 0 for q={q}, x={x}")
            return num // 3
    raise DomainError(f"no branch of the map applies to q={q}, x={x}")


def spectrum_closed_form(lam: RationalLike) -> Optional[Fraction]:
    """``m/q`` when ``lam = m 3^n / q`` in lowest terms with ``m`` in ``{1, 2}``, else ``None``."""
    lam = check_lambda(lam)
    m = lam.numerator
    while m % 3 == 0:
        m //= 3
    if m in (1, 2):
        return Fraction(m, lam.denominator)
    return None
