"""Partitions, the Q-matrix and combined cubic Hodge integrals.

A table entry ``(g, k, nu)`` is the combination

    sum_{k1+k2+k3=k} (-1)^(k2+k3) 2^(-k1) <lambda_k1 lambda_k2 lambda_k3 tau_nu>_g

which is what the Taylor coefficients of ``H_g`` compute directly: the
``t^nu`` coefficient of ``H_g(t)`` times ``m(nu)!``.  Only the combination
is ever needed.
"""
from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Iterator, Mapping, Sequence

from .algebra import Q, Rational, Series, fixed_point_solve, format_rational, parse_rational
from .jets import JetError, JetFunction, builtin_F, d0_power, jet_substitute

__all__ = [
    "Partition",
    "partitions",
    "q_matrix",
    "q_matrix_bruteforce",
    "HodgeTable",
    "TableError",
    "taylor_hodge_table",
    "stable_hodge_table",
    "q_jet_expansion",
    "c2_evaluate",
    "INTERPRETIVE_ASSUMPTIONS",
]

INTERPRETIVE_ASSUMPTIONS = (
    "Q-matrix: the tuple components mu^q range over partitions of rho_q",
    "the bracket inside the m-sum is a genus-m integral",
)


class TableError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    @property
    def m_factorial(self) -> int:
        """``m(lambda)! = prod_i m_i(lambda)!``."""
        return prod(factorial(m) for m in Counter(self.parts).values())

    def plus_one(self) -> "Partition":
        return Partition(tuple(p + 1 for p in self.parts))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse lexicographic order."""
    if n < 0:
        return []
    return [Partition(p) for p in _partitions(n, n)]


# -- Q-matrix ----------------------------------------------------------------------

def _block_weight(rho_q: int, mu_q: Sequence[int]) -> Rational:
    """``(rho_q + l)! (-1)^l / (m(mu_q)! prod_j (j+1)!^{m_j})`` for one tuple entry."""
    l = len(mu_q)
    denom = prod(factorial(m) for m in Counter(mu_q).values())
    denom *= prod(factorial(j + 1) for j in mu_q)
    return Q((-1) ** l * factorial(rho_q + l), denom)


def _sub_multisets(avail: tuple[tuple[int, int], ...], target: int):
    """Sub-multisets of ``avail`` (pairs part, count) with the given sum."""
    if target == 0:
        yield (), avail
        return
    if not avail:
        return
    (part, count), rest = avail[0], avail[1:]
    for take in range(min(count, target // part), -1, -1):
        left = ((part, count - take),) if count - take else ()
        for chosen, remaining in _sub_multisets(rest, target - take * part):
            yield (part,) * take + chosen, left + remaining


@lru_cache(maxsize=None)
def _q(rho: tuple[int, ...], avail: tuple[tuple[int, int], ...]) -> Rational:
    if not rho:
        return Q(1) if not avail else Q(0)
    total = Q(0)
    for chosen, remaining in _sub_multisets(avail, rho[0]):
        if chosen:
            total += _block_weight(rho[0], chosen) * _q(rho[1:], remaining)
    return total


def q_matrix(rho: Partition, mu: Partition) -> Rational:
    """``Q^{rho mu}``: signed sum over tuples ``(mu^1, ...)`` with ``mu^q`` a partition of
    ``rho_q`` and multiset union ``mu``."""
    rho, mu = Partition(tuple(rho)), Partition(tuple(mu))
    if rho.weight != mu.weight:
        return Q(0)
    avail = tuple(sorted(Counter(mu.parts).items(), reverse=True))
    return (-1) ** rho.length * _q(rho.parts, avail)


def q_matrix_bruteforce(rho: Partition, mu: Partition) -> Rational:
    """Independent evaluation: assign each labeled part of ``mu`` to a block."""
    rho, mu = Partition(tuple(rho)), Partition(tuple(mu))
    if rho.weight != mu.weight:
        return Q(0)
    tuples = set()
    for assign in itertools.product(range(rho.length), repeat=mu.length):
        blocks = [[] for _ in rho.parts]
        for part, q in zip(mu.parts, assign):
            blocks[q].append(part)
        if all(sum(b) == r for b, r in zip(blocks, rho.parts)):
            tuples.add(tuple(tuple(sorted(b, reverse=True)) for b in blocks))
    total = Q(0)
    for tup in tuples:
        term = Q((-1) ** rho.length)
        for r, block in zip(rho.parts, tup):
            term *= _block_weight(r, block)
        total += term
    return total


# -- tables ----------------------------------------------------------------------------

def _expected_k(g: int, nu) -> int:
    return 3 * g - 3 + nu.length - nu.weight


class HodgeTable:
    """Combined cubic Hodge integrals keyed by ``(g, k, nu)``.

    ``nu`` may contain zeros (``tau_0``); it is stored as a sorted tuple.
    """

    def __init__(self, entries: Mapping[tuple, object] | None = None):
        self._entries: dict[tuple[int, int, tuple[int, ...]], Rational] = {}
        for (g, k, nu), value in (entries or {}).items():
            self.set(g, k, nu, value)

    @staticmethod
    def _nu(nu) -> tuple[int, ...]:
        nu = tuple(sorted((int(i) for i in nu), reverse=True))
        if any(i < 0 for i in nu):
            raise TableError(f"negative psi exponent in {nu}")
        return nu

    @staticmethod
    def admissible(g: int, k: int, nu: Sequence[int]) -> bool:
        return k + sum(nu) == 3 * g - 3 + len(nu)

    def set(self, g: int, k: int, nu, value) -> None:
        nu = self._nu(nu)
        if not self.admissible(g, k, nu):
            raise TableError(f"entry (g={g}, k={k}, nu={nu}) violates k + |nu| = 3g - 3 + l(nu)")
        self._entries[(g, k, nu)] = Q(value)

    def get(self, g: int, k: int, nu) -> Rational:
        """The entry; zero off the dimension constraint, ``KeyError`` if not computed."""
        nu = self._nu(nu)
        if not self.admissible(g, k, nu):
            return Q(0)
        return self._entries[(g, k, nu)]

    def __contains__(self, key) -> bool:
        g, k, nu = key
        return (g, k, self._nu(nu)) in self._entries

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return isinstance(other, HodgeTable) and self._entries == other._entries

    def items(self) -> Iterator[tuple[tuple[int, int, tuple[int, ...]], Rational]]:
        return iter(sorted(self._entries.items()))

    def genera(self) -> set[int]:
        return {g for g, _, _ in self._entries}

    def records(self) -> list[dict]:
        return [{"genus": g, "k": k, "nu": list(nu), "value": format_rational(v)}
                for (g, k, nu), v in self.items()]

    def dumps(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())

    @classmethod
    def loads(cls, text: str) -> "HodgeTable":
        table = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                table.set(int(r["genus"]), int(r["k"]), r["nu"], parse_rational(str(r["value"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise TableError(f"line {lineno}: {exc}") from exc
        return table

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "HodgeTable":
        with open(path) as fh:
            return cls.loads(fh.read())


def _coefficient_table(g: int, series: Series, cells: Iterable[tuple[int, ...]]) -> HodgeTable:
    names = series.variables
    table = HodgeTable()
    for nu in cells:
        alpha = [0] * len(names)
        for i in nu:
            alpha[names.index(f"t{i}")] += 1
        coeff = series.coefficient(tuple(alpha))
        if coeff.has_log() or any(e for e in coeff.poly if e != 0):
            raise TableError(f"non-numeric coefficient for nu={nu}: {coeff}")
        value = coeff.poly.get(0, Q(0))
        table.set(g, _expected_k(g, _Nu(nu)), nu, value * prod(factorial(m) for m in Counter(nu).values()))
    return table


class _Nu:
    """Length/weight view of a psi-exponent tuple that may contain zeros."""

    def __init__(self, nu):
        self.length, self.weight = len(nu), sum(nu)


def _substituted_H(H: JetFunction, jets: list[Series]) -> Series:
    return jet_substitute(H, jets[0], jets)


def taylor_hodge_table(g: int, H: JetFunction, max_length: int) -> HodgeTable:
    """Entries for every ``nu`` (zeros allowed) with ``l(nu) <= max_length``.

    ``v(t)`` solves ``v = sum_i t_i v^i/i!`` to total degree ``max_length``
    plus headroom for the ``t_0``-derivatives that produce the jets.
    """
    if g < 1:
        raise ValueError("genus must be >= 1")
    n = max(H.max_index(), 1)
    M = max(3 * g - 3 + max_length, 1)
    names = tuple(f"t{i}" for i in range(M + 1))
    D = max_length + n
    ts = [Series.variable(names, D, name) for name in names]
    v = fixed_point_solve(
        lambda v: sum((ts[i] * (v ** i).scale(Q(1, factorial(i))) for i in range(1, M + 1)), ts[0]),
        ts[0], D)
    jets = [v]
    for _ in range(n):
        jets.append(jets[-1].derivative("t0"))
    jets = [j.truncate(max_length) for j in jets]
    series = _substituted_H(H, jets)
    cells = []
    for length in range(max_length + 1):
        for nu in itertools.combinations_with_replacement(range(M, -1, -1), length):
            if _expected_k(g, _Nu(nu)) >= 0:
                cells.append(nu)
    return _coefficient_table(g, series, cells)


def stable_hodge_table(g: int, H: JetFunction) -> HodgeTable:
    """Entries ``(g, k, rho + 1)`` for all partitions ``rho`` with ``|rho| <= 3g - 3``.

    Uses ``t_0 = t_1 = 0``: then ``v_k = k! [h^k] v`` where
    ``v = h + sum_{i>=2} t_i v^i/i!``, so ``v = 0``, ``v_1 = 1`` and ``v_k``
    is a polynomial in ``t_2..t_k`` of weight ``k - 1`` (``t_i`` weighs ``i - 1``).
    """
    if g < 2:
        raise ValueError("genus must be >= 2")
    W = 3 * g - 3
    N = max(H.max_index(), W + 1)
    tnames = tuple(f"t{i}" for i in range(2, N + 1))
    names = ("h",) + tnames
    hring = Series.variable(names, N, "h", weights=(1,) + (0,) * len(tnames))
    ts = [hring.var(t) for t in tnames]
    v = fixed_point_solve(
        lambda v: sum((t * (v ** i).scale(Q(1, factorial(i))) for i, t in enumerate(ts, 2)), hring),
        hring, N)
    weights = tuple(i - 1 for i in range(2, N + 1))
    jets = [Series(tnames, W, {}, weights), Series.constant(tnames, W, 1, weights)]
    for k in range(2, N + 1):
        terms = {}
        for (alpha, e, l), c in v.raw_terms().items():
            if alpha[0] == k:
                key = alpha[1:]
                if sum(a * w for a, w in zip(key, weights)) <= W:
                    terms[(key, e, l)] = c * factorial(k)
        jets.append(Series(tnames, W, terms, weights))
    series = _substituted_H(H, jets)
    cells = [rho.plus_one().parts for n in range(W + 1) for rho in partitions(n)]
    return _coefficient_table(g, series, cells)


def q_jet_expansion(m: int, table: HodgeTable) -> JetFunction:
    """The differential polynomial assembled from genus-m table entries and the Q-matrix."""
    if m < 2:
        raise ValueError("m must be >= 2")
    W = 3 * m - 3
    missing = [(k, rho.parts) for k in range(W + 1) for rho in partitions(W - k)
               if (m, k, rho.plus_one().parts) not in table]
    if missing:
        raise TableError(f"missing table entries (k, rho): {missing}")
    total = JetFunction()
    for k in range(W + 1):
        ps = partitions(W - k)
        for rho in ps:
            entry = table.get(m, k, rho.plus_one().parts)
            if not entry:
                continue
            entry = entry / rho.m_factorial
            for mu in ps:
                q = q_matrix(rho, mu)
                if not q:
                    continue
                mono = JetFunction.var(1, -(mu.length + m - 1 - k))
                for part in mu.plus_one():
                    mono = mono * JetFunction.var(part)
                total = total + mono.scale(entry * q)
    return total


def c2_evaluate(g: int, tables: Mapping[int, HodgeTable], check: bool = True) -> JetFunction:
    """Assemble ``F_g`` from tables for genera ``2..g``; optionally compare with the built-in."""
    if g < 2:
        raise ValueError("g must be >= 2")
    H1 = JetFunction.var(0).scale(Q(-1, 16)) + JetFunction.log_v1(Q(1, 24))
    total = JetFunction.var(2 * g - 2).scale(Q(1, 4 ** g * factorial(2 * g)))
    total = total + d0_power(H1, 2 * g - 2).scale(Q(1, 2 ** (2 * g - 3) * factorial(2 * g - 2)))
    for m in range(2, g + 1):
        if m not in tables:
            raise TableError(f"no table for genus {m}")
        bracket = q_jet_expansion(m, tables[m])
        c = Q(2 ** (3 * m), 2 ** (2 * g) * factorial(2 * g - 2 * m))
        total = total + d0_power(bracket, 2 * (g - m)).scale(c)
    if check and g <= 5:
        diff = total - builtin_F(g)
        if not diff.is_zero():
            raise JetError(f"F_{g} mismatch, difference: {diff}")
    return total
