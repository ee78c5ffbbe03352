"""Symbolic dynamics of codings: forbidden-block subshifts, dimensions, multiplicities."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import networkx as nx
import numpy as np

from ._guard import check_depth
from .errors import DomainError, NumericError
from .numeric import Digit, RationalLike, check_lambda, word_str
from .structure import lex_origin_numerators, membership_automaton, tss_exact, word_from_rank

DEFAULT_TOL = 1e-12
MAX_POWER_STEPS = 100_000
PAIR_DEPTH_GUARD = 10


def _contains(w: tuple, sub: tuple) -> bool:
    k = len(sub)
    return any(w[s:s + k] == sub for s in range(len(w) - k + 1))


@dataclass(frozen=True)
class Sft:
    """Subshift over ``{Z, L, T}`` avoiding ``forbidden``.

    ``transfer[a, b] = 1`` when the allowed ``(maxlen-1)``-gram ``grams[a]``
    can be followed by ``grams[b]``, i.e. they overlap in all but one letter
    and the joined word avoids every forbidden block.
    """

    forbidden: tuple
    grams: tuple
    transfer: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return max(len(f) for f in self.forbidden) - 1

    def admits(self, w) -> bool:
        return not any(_contains(tuple(w), f) for f in self.forbidden)

    def __str__(self) -> str:
        return "SFT avoiding {" + ", ".join(word_str(f) for f in self.forbidden) + "}"


def make_sft(forbidden) -> Sft:
    forbidden = tuple(sorted({tuple(Digit(d) for d in f) for f in forbidden}))
    if not forbidden or any(len(f) < 2 for f in forbidden):
        raise DomainError("forbidden blocks must have length >= 2")
    for a, b in itertools.permutations(forbidden, 2):
        if _contains(b, a):
            raise DomainError(f"{word_str(a)} is a subword of {word_str(b)}")
    order = max(len(f) for f in forbidden) - 1
    grams = tuple(g for g in itertools.product(Digit, repeat=order)
                  if not any(_contains(g, f) for f in forbidden))
    index = {g: k for k, g in enumerate(grams)}
    transfer = np.zeros((len(grams), len(grams)), dtype=np.int64)
    for g in grams:
        for d in Digit:
            joined = g + (d,)
            if not any(_contains(joined, f) for f in forbidden):
                transfer[index[g], index[joined[1:]]] = 1
    return Sft(forbidden, grams, transfer)


def build_sft(m: int, variant: str = "full") -> Sft:
    """``full`` forbids ``Z T^m``; ``unique`` also forbids ``L Z^m``."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    forbidden = [(Digit.Z,) + (Digit.T,) * m]
    if variant == "unique":
        forbidden.append((Digit.L,) + (Digit.Z,) * m)
    elif variant != "full":
        raise DomainError(f"unknown SFT variant {variant!r}")
    return make_sft(forbidden)


def count_admissible(sft: Sft, n: int) -> int:
    """Exact number of length-``n`` words avoiding every forbidden block."""
    if n < 1:
        raise DomainError("n must be positive")
    order = sft.order
    if n <= order:
        return sum(1 for w in itertools.product(Digit, repeat=n) if sft.admits(w))
    rows = sft.transfer.tolist()
    vec = [1] * len(sft.grams)
    for _ in range(n - order):
        vec = [sum(vec[a] * rows[a][b] for a in range(len(vec))) for b in range(len(vec))]
    return sum(vec)


def sft_growth_rate(sft: Sft, iterations: int = MAX_POWER_STEPS, tol: float = DEFAULT_TOL) -> float:
    """Perron eigenvalue of the transfer matrix by power iteration."""
    a = sft.transfer.astype(float)
    x = np.ones(a.shape[0]) / a.shape[0]
    rate = 0.0
    for _ in range(iterations):
        y = a.T @ x
        new_rate = y.sum() / x.sum()
        x = y / y.sum()
        if abs(new_rate - rate) <= tol * new_rate:
            return float(new_rate)
        rate = new_rate
    raise NumericError(f"power iteration did not converge in {iterations} steps")


def sft_dimension(sft: Sft, **kwargs) -> float:
    return math.log(sft_growth_rate(sft, **kwargs)) / math.log(3)


# -- dimension equations --------------------------------------------------------

def _poly(m: int, c: int, u: float) -> float:
    # u = 3^x turns 3^(1+mx) = 3^((m+1)x) + c into u^(m+1) - 3u^m + c = 0
    return u ** m * (u - 3) + c


def dimension_solve(m: int, variant: str = "s", tol: float = DEFAULT_TOL) -> float:
    """Root of ``3^(1+mx) = 3^((m+1)x) + c`` with ``c = 1`` (``s``) or ``2`` (``t``).

    Bisection runs on ``u = 3^x`` over ``[2, 3]``, where the polynomial is
    ``<= 0`` at 2 and positive at 3.  It stops once the residual is below
    ``tol`` or the bracket can no longer shrink in floating point.
    """
    if m < 1:
        raise DomainError("m must be a positive integer")
    c = {"s": 1, "t": 2}.get(variant)
    if c is None:
        raise DomainError(f"variant must be 's' or 't', got {variant!r}")
    lo, hi = 2.0, 3.0
    f_lo, f_hi = _poly(m, c, lo), _poly(m, c, hi)
    if f_lo == 0:
        return _polish(m, variant, math.log(lo) / math.log(3))
    if not (f_lo < 0 < f_hi):
        raise NumericError(f"bracket [2, 3] does not isolate the root for m={m}, c={c}")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _poly(m, c, mid)
        if f_mid == 0 or abs(f_mid) < tol * 1e-3:
            lo = hi = mid
            break
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    u = lo if abs(_poly(m, c, lo)) <= abs(_poly(m, c, hi)) else hi
    return _polish(m, variant, math.log(u) / math.log(3))


def _polish(m: int, variant: str, x: float, steps: int = 4) -> float:
    # log() rounding can leave x a few ulps off the best float for the exponential form
    candidates = [x]
    up = down = x
    for _ in range(steps):
        up, down = math.nextafter(up, 2.0), math.nextafter(down, 0.0)
        candidates += [up, down]
    return min(candidates, key=lambda y: (abs(dimension_residual(m, y, variant)), abs(y - x)))


def dimension_residual(m: int, x: float, variant: str = "s") -> float:
    """``3^(1+mx) - 3^((m+1)x) - c`` evaluated in the original exponential form."""
    c = {"s": 1, "t": 2}[variant]
    return 3 ** (1 + m * x) - 3 ** ((m + 1) * x) - c


@dataclass(frozen=True)
class DimensionPair:
    m: int
    s: float
    t: float
    tol: float


def dimension_pair(m: int, tol: float = DEFAULT_TOL) -> DimensionPair:
    return DimensionPair(m, dimension_solve(m, "s", tol), dimension_solve(m, "t", tol), tol)


# -- codings of individual points ----------------------------------------------

@dataclass
class CodingGraph:
    """Membership automaton of ``x`` trimmed to states that start an infinite path.

    Infinite paths from ``initial`` correspond one-to-one to codings of ``x``.
    """

    x: Fraction
    lam: Fraction
    graph: nx.DiGraph = field(repr=False)

    @property
    def initial(self) -> Fraction:
        return self.x

    def is_empty(self) -> bool:
        return self.graph.number_of_nodes() == 0

    @property
    def components(self) -> list[frozenset]:
        return [frozenset(c) for c in nx.strongly_connected_components(self.graph)]

    def condensation(self) -> nx.DiGraph:
        return nx.condensation(self.graph)

    def prefixes(self, n: int) -> Iterator[tuple[Digit, ...]]:
        """Every length-``n`` prefix of a coding, in lexicographic order."""
        if self.is_empty():
            return
        stack = [(self.x, ())]
        while stack:
            r, w = stack.pop()
            if len(w) == n:
                yield w
                continue
            succ = sorted(((self.graph.edges[r, s]["digit"], s) for s in self.graph.successors(r)),
                          reverse=True)
            for d, s in succ:
                stack.append((s, w + (d,)))


def coding_graph(x: RationalLike, lam: RationalLike) -> CodingGraph:
    auto = membership_automaton(x, lam)
    g = auto.graph
    cyclic = set()
    for comp in nx.strongly_connected_components(g):
        node = next(iter(comp))
        if len(comp) > 1 or g.has_edge(node, node):
            cyclic |= comp
    live = set(cyclic)
    for node in cyclic:
        live |= nx.ancestors(g, node)
    trimmed = g.subgraph(live).copy() if auto.initial in live else nx.DiGraph()
    return CodingGraph(auto.initial, auto.lam, trimmed)


@dataclass(frozen=True)
class MultiplicityClass:
    kind: str  # "finite" | "countable" | "continuum"
    count: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"Finite({self.count})"
        return "CountablyInfinite" if self.kind == "countable" else "Continuum"


def Finite(k: int) -> MultiplicityClass:
    return MultiplicityClass("finite", k)


COUNTABLY_INFINITE = MultiplicityClass("countable")
CONTINUUM = MultiplicityClass("continuum")


def coding_multiplicity(x: RationalLike, lam: RationalLike) -> MultiplicityClass:
    """Number of codings of ``x``: ``Finite(k)``, countably infinite, or continuum.

    On the trimmed graph: a strongly connected component with more internal
    edges than nodes carries two distinct cycles, hence a continuum of paths.
    Otherwise every cyclic component is a simple cycle.  If one of them has an
    exit, paths may loop there any number of times before moving on, giving
    countably many.  If none has an exit, the paths are counted exactly.
    """
    cg = coding_graph(x, lam)
    if cg.is_empty():
        raise DomainError(f"{cg.x} is not in E_{cg.lam}")
    g = cg.graph
    comps = cg.components
    owner = {v: k for k, comp in enumerate(comps) for v in comp}
    cyclic = set()
    for k, comp in enumerate(comps):
        internal = sum(1 for u in comp for v in g.successors(u) if v in comp)
        if internal > len(comp):
            return CONTINUUM
        if internal == len(comp):
            cyclic.add(k)
    for u, v in g.edges:
        if owner[u] in cyclic and owner[v] != owner[u]:
            return COUNTABLY_INFINITE
    counts: dict = {}
    for v in reversed(list(nx.topological_sort(nx.condensation(g, comps)))):
        comp = comps[v]
        if v in cyclic:
            for node in comp:
                counts[node] = 1
        else:
            (node,) = comp
            counts[node] = sum(counts[s] for s in g.successors(node))
    return Finite(counts[cg.x])


def pair_coincidence(lam: RationalLike, depth: int) -> list[tuple[tuple[Digit, ...], tuple[Digit, ...]]]:
    """All pairs of distinct equal-length words (length ``<= depth``) naming the same map.

    Two words of equal length name the same map exactly when their scaled
    offset returns to zero, i.e. when ``f_i(0) = f_j(0)``.  Pairs are listed
    by length, each pair ordered ``i < j`` lexicographically.
    """
    lam = check_lambda(lam)
    if not tss_exact(lam)[0]:
        raise DomainError(f"pair_coincidence is restricted to lambda = 1 - 3^-m, got {lam}")
    check_depth(depth, PAIR_DEPTH_GUARD, "pair_coincidence")
    out = []
    for n in range(1, depth + 1):
        origins = lex_origin_numerators(lam, n).tolist()
        groups: dict = {}
        for rank, value in enumerate(origins):
            groups.setdefault(value, []).append(rank)
        pairs = []
        for ranks in groups.values():
            for a, b in itertools.combinations(ranks, 2):
                pairs.append((word_from_rank(a, n), word_from_rank(b, n)))
        out.extend(sorted(pairs))
    return out
