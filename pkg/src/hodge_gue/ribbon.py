"""Brute-force ribbon graph census.

Vertex ``j`` of a profile ``(i_1, ..., i_k)`` carries ``2 i_j`` labeled
half-edges in cyclic order.  A perfect matching ``alpha`` of all half-edges
is a ribbon graph; its faces are the cycles of ``sigma . alpha`` where
``sigma`` rotates each vertex, and ``V - E + F = 2 - 2g`` gives the genus
of each connected one.

The normalization ``a_g = (connected matchings of genus g) / prod_r m_r!``
was pinned against three genus-zero coefficients and is checked on every
profile within the budget.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, prod
from typing import Sequence

from .algebra import Q, Rational, Series, series_log
from .correspondence import VerificationError
from .genus_zero import F0_closed, solve_w
from .jets import builtin_F, jet_substitute

__all__ = [
    "ValencyProfile",
    "MatchingCensus",
    "BudgetError",
    "NormalizationError",
    "enumerate_matchings",
    "a_coefficient",
    "matching_genus",
    "extract_a_from_F",
    "one_vertex_counts",
    "profiles_up_to",
    "compare_profile",
    "compare_all",
    "one_vertex_rows",
    "double_factorial",
    "catalan",
]

DEFAULT_BUDGET = 16


class BudgetError(ValueError):
    pass


class NormalizationError(ArithmeticError):
    pass


def double_factorial(n: int) -> int:
    """``n!!`` with ``(-1)!! = 0!! = 1``."""
    return prod(range(n, 0, -2)) if n > 0 else 1


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


@dataclass(frozen=True)
class ValencyProfile:
    i: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.i), reverse=True))
        if not parts:
            raise ValueError("a profile needs at least one vertex")
        if any(p <= 0 for p in parts):
            raise ValueError("valency indices must be positive")
        object.__setattr__(self, "i", parts)

    @classmethod
    def parse(cls, text: str) -> "ValencyProfile":
        return cls(tuple(int(p) for p in text.replace(" ", "").split(",") if p))

    @property
    def k(self) -> int:
        return len(self.i)

    @property
    def edges(self) -> int:
        return sum(self.i)

    @property
    def halfedges(self) -> int:
        return 2 * self.edges

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.i))

    @property
    def symmetry(self) -> int:
        return prod(factorial(m) for m in Counter(self.i).values())

    def max_genus(self) -> int:
        """Largest genus with at least one face: ``F = 2 - 2g - k + |i| >= 1``."""
        return (1 + self.edges - self.k) // 2

    def x_exponent(self, g: int) -> int:
        return 2 - 2 * g - (self.k - self.edges)

    def __str__(self):
        return ",".join(map(str, self.i))


@dataclass
class MatchingCensus:
    profile: ValencyProfile
    counts: dict[int, int] = field(default_factory=dict)
    disconnected: int = 0

    @property
    def connected(self) -> int:
        return sum(self.counts.values())

    @property
    def total(self) -> int:
        return self.connected + self.disconnected

    def check_total(self) -> bool:
        return self.total == double_factorial(self.profile.halfedges - 1)

    def merge(self, other: "MatchingCensus") -> "MatchingCensus":
        counts = Counter(self.counts)
        counts.update(other.counts)
        return MatchingCensus(self.profile, dict(sorted(counts.items())),
                              self.disconnected + other.disconnected)


def _layout(profile: ValencyProfile) -> tuple[list[int], list[int]]:
    rot, vertex = [], []
    start = 0
    for j, i in enumerate(profile.i):
        n = 2 * i
        for h in range(n):
            rot.append(start + (h + 1) % n)
            vertex.append(j)
        start += n
    return rot, vertex


def matching_genus(profile: ValencyProfile, partner: Sequence[int]) -> int | None:
    """Genus of the ribbon graph given by ``partner``, or ``None`` if it is disconnected."""
    rot, vertex = _layout(profile)
    H = profile.halfedges
    if sorted(partner) != list(range(H)) or any(partner[partner[h]] != h or partner[h] == h for h in range(H)):
        raise ValueError("partner is not a fixed-point-free involution")
    parent = list(range(profile.k))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for h in range(H):
        parent[find(vertex[h])] = find(vertex[partner[h]])
    if len({find(j) for j in range(profile.k)}) > 1:
        return None
    seen = bytearray(H)
    faces = 0
    for h in range(H):
        if not seen[h]:
            faces += 1
            while not seen[h]:
                seen[h] = 1
                h = rot[partner[h]]
    twice_g = 2 - profile.k + profile.edges - faces
    if twice_g < 0 or twice_g % 2:
        raise ArithmeticError(f"non-integral genus {twice_g}/2 for {profile}")
    return twice_g // 2


def _census_block(profile: ValencyProfile, first: int) -> MatchingCensus:
    """All matchings in which half-edge 0 is paired with ``first``."""
    rot, vertex = _layout(profile)
    H, k, E = profile.halfedges, profile.k, profile.edges
    partner = [0] * H
    counts: Counter = Counter()
    disconnected = 0

    def leaf():
        nonlocal disconnected
        if k > 1:
            parent = list(range(k))

            def find(a):
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            comps = k
            for h in range(H):
                a, b = find(vertex[h]), find(vertex[partner[h]])
                if a != b:
                    parent[a] = b
                    comps -= 1
            if comps > 1:
                disconnected += 1
                return
        seen = bytearray(H)
        faces = 0
        for h in range(H):
            if not seen[h]:
                faces += 1
                while not seen[h]:
                    seen[h] = 1
                    h = rot[partner[h]]
        twice_g = 2 - k + E - faces
        if twice_g < 0 or twice_g % 2:
            raise ArithmeticError(f"non-integral genus {twice_g}/2 for {profile}")
        counts[twice_g // 2] += 1

    def rec(free: list[int]):
        if not free:
            leaf()
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            partner[a], partner[b] = b, a
            rec(free[1:idx] + free[idx + 1:])

    partner[0], partner[first] = first, 0
    rec([h for h in range(1, H) if h != first])
    return MatchingCensus(profile, dict(counts), disconnected)


def enumerate_matchings(profile: ValencyProfile | Sequence[int], budget: int = DEFAULT_BUDGET,
                        workers: int | None = None) -> MatchingCensus:
    """Exhaustive census of all ``(2|i| - 1)!!`` matchings, split by the partner of half-edge 0."""
    if not isinstance(profile, ValencyProfile):
        profile = ValencyProfile(tuple(profile))
    if profile.halfedges > budget:
        hint = " use one_vertex_counts for a single vertex" if profile.k == 1 else ""
        raise BudgetError(f"{profile.halfedges} half-edges exceed the budget of {budget};{hint}")
    workers = workers or int(os.environ.get("HODGE_GUE_THREADS", "1"))
    firsts = range(1, profile.halfedges)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_census_block, [profile] * len(firsts), firsts))
    else:
        blocks = [_census_block(profile, f) for f in firsts]
    census = MatchingCensus(profile)
    for block in blocks:
        census = census.merge(block)
    if not census.check_total():
        raise ArithmeticError(f"census of {profile} does not total (2|i|-1)!!")
    return census


def a_coefficient(census: MatchingCensus, profile: ValencyProfile | None = None) -> dict[int, Rational]:
    profile = profile or census.profile
    return {g: Q(c, profile.symmetry) for g, c in sorted(census.counts.items())}


# -- one vertex ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _harer_zagier(n: int, g: int) -> int:
    """Genus-g gluings of a 2n-gon: ``(n+1) e_g(n) = 2(2n-1) e_g(n-1) + (n-1)(2n-1)(2n-3) e_{g-1}(n-2)``."""
    if n < 0 or g < 0:
        return 0
    if n == 0:
        return int(g == 0)
    num = 2 * (2 * n - 1) * _harer_zagier(n - 1, g)
    num += (n - 1) * (2 * n - 1) * (2 * n - 3) * _harer_zagier(n - 2, g - 1)
    q, r = divmod(num, n + 1)
    if r:
        raise ArithmeticError(f"non-integral recurrence value at n={n}, g={g}")
    return q


@lru_cache(maxsize=None)
def _self_test() -> None:
    for m in range(1, 7):
        brute = enumerate_matchings((m,), workers=1).counts
        fast = {g: _harer_zagier(m, g) for g in range(m // 2 + 1)}
        if brute != {g: c for g, c in fast.items() if c}:
            raise VerificationError(f"one-vertex recurrence disagrees with brute force at m={m}")
        if fast[0] != catalan(m):
            raise VerificationError(f"genus-0 count at m={m} is not Catalan")


def one_vertex_counts(m: int, g_max: int | None = None) -> dict[int, int]:
    """Per-genus matchings of a single ``2m``-valent vertex."""
    if not 1 <= m <= 12:
        raise ValueError("m must be in 1..12")
    _self_test()
    top = m // 2 if g_max is None else min(g_max, m // 2)
    return {g: _harer_zagier(m, g) for g in range(top + 1) if _harer_zagier(m, g)}


# -- series side -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _F_series(g: int, couplings: tuple[int, ...], D: int) -> Series:
    if g == 0:
        return F0_closed(None, D, couplings)
    u = series_log(solve_w(None, D, couplings))
    return jet_substitute(builtin_F(g), u)


def extract_a_from_F(g: int, profile: ValencyProfile | Sequence[int], D: int | None = None) -> Rational:
    """``a_g(i)`` read off the ``s_{i_1}...s_{i_k}`` coefficient of ``F_g(x, s)``."""
    if not isinstance(profile, ValencyProfile):
        profile = ValencyProfile(tuple(profile))
    if not 0 <= g <= 5:
        raise ValueError("genus must be in 0..5")
    couplings = tuple(sorted(set(profile.i)))
    D = profile.k if D is None else D
    if D < profile.k:
        raise ValueError("truncation degree below the number of vertices")
    series = _F_series(g, couplings, D)
    mult = profile.multiplicities
    coeff = series.coefficient(tuple(mult[c] for c in couplings))
    coeff = coeff * prod(comb(2 * i, i) for i in profile.i)
    if coeff.is_zero():
        return Q(0)
    mono = coeff.monomial()
    e = profile.x_exponent(g)
    if mono is None or mono[1] != e:
        raise NormalizationError(f"coefficient {coeff} of {profile} at genus {g} is not a multiple of x^{e}")
    return mono[0]


def profiles_up_to(halfedges: int) -> list[ValencyProfile]:
    """All profiles with at most ``halfedges`` half-edges."""
    out = []

    def rec(left, largest, acc):
        if acc:
            out.append(ValencyProfile(tuple(acc)))
        for p in range(min(left, largest), 0, -1):
            rec(left - p, p, acc + [p])

    rec(halfedges // 2, halfedges // 2, [])
    return sorted(out, key=lambda p: (p.halfedges, p.i))


def compare_profile(profile: ValencyProfile, max_genus: int = 5, census: MatchingCensus | None = None,
                    counts: dict[int, int] | None = None) -> list[dict]:
    """Rows ``{profile, genus, count, oracle, series, equal}`` for every admissible genus."""
    if counts is None:
        census = census or enumerate_matchings(profile)
        counts = census.counts
    rows = []
    for g in range(min(max_genus, profile.max_genus(), 5) + 1):
        oracle = Q(counts.get(g, 0), profile.symmetry)
        series = extract_a_from_F(g, profile)
        rows.append({
            "profile": list(profile.i),
            "genus": g,
            "count": counts.get(g, 0),
            "oracle": oracle,
            "series": series,
            "equal": oracle == series,
        })
    return rows


def compare_all(halfedges: int = 12, max_genus: int = 5) -> list[dict]:
    rows = []
    for profile in profiles_up_to(halfedges):
        rows.extend(compare_profile(profile, max_genus))
    return rows


def one_vertex_rows(m: int, g: int) -> dict:
    """Single row for profile ``(m)`` at genus ``g`` using the recurrence."""
    profile = ValencyProfile((m,))
    return compare_profile(profile, g, counts=one_vertex_counts(m))[g]
