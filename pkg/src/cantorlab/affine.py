"""Affine self-embeddings ``g(x) = mu x + b`` with ``g(E_lambda) ⊆ E_lambda``.

Finite testing can only ever refute an inclusion: the test points are the
endpoints ``f_w(0)`` and ``f_w(1)`` of basic intervals, all of which lie in
``E_lambda``, and a refutation exhibits one whose image leaves some ``I_n``.
Acceptance is certified only through the exact classification, which is
available when ``lambda = 1 - 3^-m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ._guard import check_depth
from .errors import DomainError
from .numeric import Digit, RationalLike, as_rational, check_lambda, eval_word_origin, word_str
from .structure import DEFAULT_DEPTH_GUARD, level_components, origin_numerators, tss_exact

ACCEPTED, REJECTED, INCONCLUSIVE = "accepted", "rejected", "inconclusive"


@dataclass(frozen=True)
class AffineMap:
    mu: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", as_rational(self.mu))
        object.__setattr__(self, "b", as_rational(self.b))
        if self.mu == 0:
            raise DomainError("mu must be nonzero")

    def __call__(self, x) -> Fraction:
        return self.mu * as_rational(x) + self.b

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self ∘ other``."""
        return AffineMap(self.mu * other.mu, self.mu * other.b + self.b)

    @classmethod
    def from_word(cls, w: Sequence[Digit], lam: RationalLike) -> "AffineMap":
        return cls(Fraction(1, 3 ** len(w)), eval_word_origin(w, lam))

    def __str__(self) -> str:
        return f"x -> {self.mu}·x + {self.b}"


@dataclass(frozen=True)
class VerifyResult:
    status: str
    depth: int
    witness: Optional[Fraction] = None
    witness_word: Optional[tuple] = None
    image: Optional[Fraction] = None
    word: Optional[tuple] = field(default=None, compare=False)

    def __str__(self) -> str:
        if self.status == REJECTED:
            return (f"rejected at depth {self.depth}: x = {self.witness} "
                    f"(endpoint of word {word_str(self.witness_word)}) maps to {self.image}")
        if self.status == ACCEPTED:
            return f"accepted (g = f_{word_str(self.word)}; tested to depth {self.depth})"
        return f"inconclusive (no refutation up to depth {self.depth})"


def _is_power_of_third(mu: Fraction) -> Optional[int]:
    if mu <= 0 or mu.numerator != 1:
        return None
    den, n = mu.denominator, 0
    while den % 3 == 0:
        den //= 3
        n += 1
    return n if den == 1 else None


def _find_word(lam: Fraction, n: int, b: Fraction) -> Optional[tuple[Digit, ...]]:
    """Lexicographically least word of length ``n`` with ``f_w(0) = b``."""
    q = lam.denominator
    scaled = b * q * 3 ** n
    if scaled.denominator != 1:
        return None
    target = scaled.numerator
    digits = (0, lam.numerator, 2 * q)
    levels = [set(origin_numerators(lam, k).tolist()) for k in range(n + 1)]
    if target not in levels[n]:
        return None
    # peel the leading digit: N = d' 3^(n-1) + N', N' an origin of length n-1
    out = []
    for k in range(n, 0, -1):
        for d in Digit:
            rest = target - digits[d] * 3 ** (k - 1)
            if rest in levels[k - 1]:
                out.append(d)
                target = rest
                break
    return tuple(out)


def classify_affine(g: AffineMap, lam: RationalLike) -> tuple[bool, Optional[tuple[Digit, ...]]]:
    """Decide whether ``g = f_i`` for some word ``i``, for ``lambda = 1 - 3^-m``.

    For such ``lambda`` these are exactly the affine maps with
    ``g(E) ⊆ E``: ``mu`` must be ``3^-n`` and ``b`` an origin of a length-``n``
    word.  Returns the lexicographically least such word.
    """
    lam = check_lambda(lam)
    if not tss_exact(lam)[0]:
        raise DomainError(f"exact classification needs lambda = 1 - 3^-m, got {lam}")
    n = _is_power_of_third(g.mu)
    if n is None:
        return False, None
    check_depth(n, DEFAULT_DEPTH_GUARD, "classify_affine")
    w = _find_word(lam, n, g.b)
    return (w is not None), w


@lru_cache(maxsize=64)
def _test_points(lam: Fraction, depth: int):
    """Basic-interval endpoints over words of length ``<= depth``, deduplicated.

    Returns numerators over ``q 3^depth`` in shortlex order of the first word
    producing each point (origin before right endpoint), and the words.
    """
    q = lam.denominator
    dig = (0, lam.numerator, 2 * q)
    seen: dict = {}
    level = [((), 0)]
    for n in range(depth + 1):
        scale = 3 ** (depth - n)
        for w, origin in level:
            for value in (origin * scale, (origin + q) * scale):
                if value not in seen:
                    seen[value] = w
        if n < depth:
            level = [(w + (d,), 3 * origin + dig[d]) for w, origin in level for d in Digit]
    values = list(seen)
    return values, [seen[v] for v in values]


def verify_affine_inclusion(g: AffineMap, lam: RationalLike, depth: int) -> VerifyResult:
    """Try to refute ``g(E) ⊆ E`` by testing ``g(x) ∈ I_n`` for ``n <= depth``.

    The reported witness fails at the least possible ``n``; among those, it
    comes from the shortlex-least word.
    """
    lam = check_lambda(lam)
    check_depth(depth, min(DEFAULT_DEPTH_GUARD, 12), "verify_affine_inclusion")
    q = lam.denominator
    values, owners = _test_points(lam, depth)
    base = q * 3 ** depth
    # images on the common denominator den: g(x) = (mu_n * v * k_mu + b_n * k_b) / den
    den = math.lcm(base * g.mu.denominator, g.b.denominator)
    mul = g.mu.numerator * (den // (base * g.mu.denominator))
    add = g.b.numerator * (den // g.b.denominator)
    use_int64 = abs(mul) * 2 * base + abs(add) + 2 * den < 2 ** 62
    dtype = np.int64 if use_int64 else object
    images = np.array(values, dtype=dtype) * mul + add
    failing = None
    for n in range(depth + 1):
        comps, comp_den = level_components(lam, n)
        f2 = den // comp_den  # q 3^n divides den
        lo = np.array([a * f2 for a, _ in comps], dtype=dtype)
        hi = np.array([b * f2 for _, b in comps], dtype=dtype)
        imgs = images
        idx = np.searchsorted(lo, imgs, side="right") - 1
        inside = (idx >= 0) & (imgs <= hi[np.clip(idx, 0, None)])
        bad = np.nonzero(~inside)[0]
        if len(bad):
            failing = (n, int(bad[0]))
            break
    if failing is not None:
        n, k = failing
        x = Fraction(values[k], base)
        return VerifyResult(REJECTED, n, x, owners[k], g(x))
    if g.mu == 1 and g.b == 0:
        return VerifyResult(ACCEPTED, depth, word=())
    if tss_exact(lam)[0]:
        ok, w = classify_affine(g, lam)
        if ok:
            return VerifyResult(ACCEPTED, depth, word=w)
    return VerifyResult(INCONCLUSIVE, depth)


@dataclass(frozen=True)
class ScanRow:
    mu: Fraction
    b: Fraction
    is_generator: bool
    word: Optional[tuple]
    result: VerifyResult


@dataclass
class EmbeddingScanReport:
    lam: Fraction
    depth: int
    rows: list
    # classified generators that were nevertheless refuted: would contradict the classification
    contradictions: list
    # non-generators not refuted yet: raise the depth
    inconclusive: list

    @property
    def consistent(self) -> bool:
        return not self.contradictions and not self.inconclusive

    def accepted(self) -> list:
        return [r for r in self.rows if r.result.status == ACCEPTED]


def embedding_scan(lam: RationalLike, n: int, b_grid: Sequence[RationalLike], depth: int) -> EmbeddingScanReport:
    """Cross-check classification against finite refutation over a ``(mu, b)`` grid.

    ``mu`` ranges over ``±3^-1, ..., ±3^-n``.
    """
    lam = check_lambda(lam)
    if not tss_exact(lam)[0]:
        raise DomainError(f"the scan needs lambda = 1 - 3^-m, got {lam}")
    mus = [Fraction(1, 3 ** k) for k in range(1, n + 1)]
    mus += [-mu for mu in mus]
    rows, contradictions, inconclusive = [], [], []
    for mu in mus:
        for b in b_grid:
            g = AffineMap(mu, as_rational(b))
            is_gen, w = classify_affine(g, lam)
            res = verify_affine_inclusion(g, lam, depth)
            row = ScanRow(g.mu, g.b, is_gen, w, res)
            rows.append(row)
            if is_gen and res.status == REJECTED:
                contradictions.append(row)
            if not is_gen and res.status != REJECTED:
                inconclusive.append(row)
    return EmbeddingScanReport(lam, depth, rows, contradictions, inconclusive)
