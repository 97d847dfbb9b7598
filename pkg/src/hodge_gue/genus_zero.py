"""Genus-zero free energies on both sides of the correspondence.

GUE side: ``w`` solves ``w = x + sum_k k sbar_k w^k`` and ``F_0`` has a closed
form in ``w``.  Hodge side: ``v(t)`` solves ``v = sum_i t_i v^i / i!`` and
``H_0`` is the Witten-Kontsevich genus-zero potential.  After the time
substitution ``t_i = sum_k k^(i+1) sbar_k - 1 + [i == 1] + x [i == 0]`` the
two are related by an explicit quadratic correction in the couplings.

Every time-variable ``t_i`` produced by the substitution is an exponential
sequence in ``i``: ``t_i - [i == 1] = sum_r A_r r^i``.  This lets ``H_0`` be
evaluated at the substituted times in closed form, without truncating the
infinite sum over ``i``.

The Frobenius-manifold route (``theta`` functions, two-point functions
``Omega``) gives a second, independent formula for ``F_0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, prod
from typing import Sequence

from .algebra import (
    AlgebraError,
    LaurentLog,
    Q,
    Rational,
    Series,
    fixed_point_solve,
    series_exp,
    series_log,
)

__all__ = [
    "CouplingMap",
    "sbar_names",
    "coupling_ring",
    "solve_w",
    "explicit_w",
    "solve_u",
    "F0_closed",
    "genus0_correction",
    "H0_closed",
    "H0_witten_kontsevich",
    "v_explicit",
    "t_substitution",
    "exponential_times",
    "H0_on_exponential_times",
    "H0_substituted",
    "v_equation_residual",
    "genus0_identity_residual",
    "ExpPoly",
    "theta_polys",
    "theta_coeffs",
    "omega_generating",
    "omega_even",
    "omega_at_v0",
    "F0_via_omega",
    "euler_lagrange_residuals",
]


def _resolve(K: int | None, couplings: Sequence[int] | None) -> tuple[int, ...]:
    if couplings is not None:
        ks = tuple(sorted(set(couplings)))
    else:
        if K is None or K < 1:
            raise ValueError("need K >= 1 or an explicit coupling list")
        ks = tuple(range(1, K + 1))
    if not ks or ks[0] < 1:
        raise ValueError("coupling indices must be positive")
    return ks


def sbar_names(couplings: Sequence[int]) -> tuple[str, ...]:
    return tuple(f"sbar{k}" for k in couplings)


def coupling_ring(K: int | None, D: int, couplings: Sequence[int] | None = None):
    """Return ``(couplings, x, [sbar_k series])`` for the ring in ``sbar``."""
    ks = _resolve(K, couplings)
    names = sbar_names(ks)
    x = Series.constant(names, D, LaurentLog.x_power(1))
    sbar = [Series.variable(names, D, n) for n in names]
    return ks, x, sbar


@dataclass(frozen=True)
class CouplingMap:
    """Conversion ``sbar_k = binomial(2k, k) * s_k`` for the active couplings."""

    couplings: tuple[int, ...]

    @classmethod
    def first(cls, K: int) -> "CouplingMap":
        return cls(tuple(range(1, K + 1)))

    @property
    def K(self) -> int:
        return len(self.couplings)

    @staticmethod
    def factor(k: int) -> int:
        return comb(2 * k, k)

    def factors(self) -> tuple[int, ...]:
        return tuple(self.factor(k) for k in self.couplings)

    def monomial_factor(self, alpha: Sequence[int]) -> int:
        """``prod c_k^alpha_k``: turns an sbar-coefficient into an s-coefficient."""
        return prod(c ** a for c, a in zip(self.factors(), alpha))

    def sbar_to_s(self, series: Series) -> Series:
        """Re-express a series in ``sbar`` as the same function of ``s``."""
        return series.map_monomials(self.monomial_factor)

    def s_to_sbar(self, series: Series) -> Series:
        return series.map_monomials(lambda a: Q(1, self.monomial_factor(a)))


def solve_w(K: int | None, D: int, couplings: Sequence[int] | None = None) -> Series:
    """Series solution of ``w = x + sum_k k sbar_k w^k`` with ``w(x, 0) = x``."""
    ks, x, sbar = coupling_ring(K, D, couplings)

    def step(w: Series) -> Series:
        total = x
        for k, s in zip(ks, sbar):
            total = total + s.scale(k) * w ** k
        return total

    return fixed_point_solve(step, x)


def _multi_indices(ks: Sequence[int], D: int):
    """All exponent vectors over ``ks`` of total degree <= D."""
    def rec(i, left):
        if i == len(ks):
            yield ()
            return
        for a in range(left + 1):
            for rest in rec(i + 1, left - a):
                yield (a,) + rest
    yield from rec(0, D)


def explicit_w(K: int | None, D: int, couplings: Sequence[int] | None = None) -> Series:
    """Weighted-composition (Lagrange inversion) formula for ``w``.

    ``w = sum_n 1/n sum_{i_1+..+i_n = n-1} wt(i_1)..wt(i_n) sbar_{i_1}..sbar_{i_n}``
    with ``sbar_0 = x``, ``wt(0) = 1`` and ``wt(i) = i`` otherwise.  Ordered
    tuples sharing a multiset are counted by a multinomial coefficient.
    """
    ks = _resolve(K, couplings)
    names = sbar_names(ks)
    terms = {}
    for alpha in _multi_indices(ks, D):
        n = 1 + sum(k * a for k, a in zip(ks, alpha))
        zeros = n - sum(alpha)
        orderings = factorial(n) // (factorial(zeros) * prod(factorial(a) for a in alpha))
        weight = prod(k ** a for k, a in zip(ks, alpha))
        terms[(alpha, zeros, 0)] = Q(orderings * weight, n)
    return Series(names, D, terms)


def solve_u(K: int | None, D: int, couplings: Sequence[int] | None = None) -> Series:
    """``u = log w``, the second x-derivative of ``F_0``."""
    return series_log(solve_w(K, D, couplings))


def F0_closed(K: int | None, D: int, couplings: Sequence[int] | None = None,
              w: Series | None = None) -> Series:
    """Closed-form genus-zero GUE free energy in terms of ``w``."""
    ks, x, sbar = coupling_ring(K, D, couplings)
    if w is None:
        w = solve_w(K, D, ks)
    powers = [w.const(1)]
    for _ in range(2 * max(ks)):
        powers.append(powers[-1] * w)
    total = powers[2].scale(Q(1, 4)) - x * w
    for k, s in zip(ks, sbar):
        total = total + s * (x * powers[k] - powers[k + 1].scale(Q(k, k + 1)))
    for k1, s1 in zip(ks, sbar):
        for k2, s2 in zip(ks, sbar):
            total = total + (s1 * s2 * powers[k1 + k2]).scale(Q(k1 * k2, 2 * (k1 + k2)))
    return total + (x * x).scale(Q(1, 2)) * series_log(w)


def genus0_correction(K: int | None, D: int, couplings: Sequence[int] | None = None) -> Series:
    """The explicit polynomial added to ``F_0`` at order ``eps^-2``:

    ``-1/2 sum k1 k2/(k1+k2) sbar sbar + sum k/(1+k) sbar - x sum sbar - 1/4 + x``.
    """
    ks, x, sbar = coupling_ring(K, D, couplings)
    total = x - Q(1, 4)
    for k1, s1 in zip(ks, sbar):
        total = total + s1.scale(Q(k1, 1 + k1)) - x * s1
        for k2, s2 in zip(ks, sbar):
            total = total - (s1 * s2).scale(Q(k1 * k2, 2 * (k1 + k2)))
    return total


# -- Hodge side around t = 0 -------------------------------------------------

def _t_ring(M: int, D: int, extra: Sequence[str] = ()):
    names = tuple(f"t{i}" for i in range(M + 1)) + tuple(extra)
    return names, [Series.variable(names, D, f"t{i}") for i in range(M + 1)]


def _solve_v(ts: Sequence[Series], seed: Series) -> Series:
    def step(v: Series) -> Series:
        total = seed.zero()
        vp = v.const(1)
        for i, t in enumerate(ts):
            total = total + (t * vp).scale(Q(1, factorial(i)))
            vp = vp * v
        return total
    return fixed_point_solve(step, seed)


def H0_closed(M: int, D: int, return_v: bool = False):
    """Genus-zero Hodge free energy in ``t_0..t_M`` to total degree ``D``.

    ``H_0 = v^3/6 - sum_i t_i v^(i+2)/(i!(i+2))
            + 1/2 sum_{i,j} t_i t_j v^(i+j+1)/((i+j+1) i! j!)``
    where ``v = sum_i t_i v^i/i!``.
    """
    if M < 2:
        raise ValueError("need M >= 2")
    names, ts = _t_ring(M, D)
    v = _solve_v(ts, ts[0])
    vp = [v.const(1)]
    for _ in range(2 * M + 2):
        vp.append(vp[-1] * v)
    total = vp[3].scale(Q(1, 6))
    for i, t in enumerate(ts):
        total = total - (t * vp[i + 2]).scale(Q(1, factorial(i) * (i + 2)))
    for i, ti in enumerate(ts):
        for j, tj in enumerate(ts):
            c = Q(1, 2 * (i + j + 1) * factorial(i) * factorial(j))
            total = total + (ti * tj * vp[i + j + 1]).scale(c)
    return (total, v) if return_v else total


def _index_multisets(M: int, length: int, weight: int):
    """Exponent vectors ``a`` over indices 0..M with sum(a) = length, sum(i a_i) = weight."""
    def rec(i, left, wleft):
        if i > M:
            if left == 0 and wleft == 0:
                yield ()
            return
        for a in range(left + 1):
            if a * i > wleft:
                break
            for rest in rec(i + 1, left - a, wleft - a * i):
                yield (a,) + rest
    yield from rec(0, length, weight)


def H0_witten_kontsevich(M: int, D: int) -> Series:
    """Direct sum ``sum_k 1/(k(k-1)(k-2)) sum_{i_1+..+i_k=k-3} prod t_i/i!``."""
    names = tuple(f"t{i}" for i in range(M + 1))
    terms = {}
    for k in range(3, D + 1):
        for alpha in _index_multisets(M, k, k - 3):
            orderings = factorial(k) // prod(factorial(a) for a in alpha)
            denom = k * (k - 1) * (k - 2) * prod(factorial(i) ** a for i, a in enumerate(alpha))
            terms[(alpha, 0, 0)] = Q(orderings, denom)
    return Series(names, D, terms)


def v_explicit(M: int, D: int) -> Series:
    """``v = sum_k 1/k sum_{i_1+..+i_k=k-1} prod t_i/i!``."""
    names = tuple(f"t{i}" for i in range(M + 1))
    terms = {}
    for k in range(1, D + 1):
        for alpha in _index_multisets(M, k, k - 1):
            orderings = factorial(k) // prod(factorial(a) for a in alpha)
            denom = k * prod(factorial(i) ** a for i, a in enumerate(alpha))
            terms[(alpha, 0, 0)] = Q(orderings, denom)
    return Series(names, D, terms)


# -- time substitution ---------------------------------------------------------

def t_substitution(K: int | None, D: int, M: int,
                   couplings: Sequence[int] | None = None) -> list[Series]:
    """``t_i(x, s) = sum_k k^(i+1) sbar_k - 1 + [i == 1] + x [i == 0]`` for i <= M."""
    ks, x, sbar = coupling_ring(K, D, couplings)
    out = []
    for i in range(M + 1):
        t = x.const(-1 + (i == 1))
        if i == 0:
            t = t + x
        for k, s in zip(ks, sbar):
            t = t + s.scale(k ** (i + 1))
        out.append(t)
    return out


def exponential_times(K: int | None, D: int,
                      couplings: Sequence[int] | None = None) -> dict[int, Series]:
    """Rates ``r -> A_r`` with ``t_i - [i == 1] = sum_r A_r r^i`` (``0^0 = 1``)."""
    ks, x, sbar = coupling_ring(K, D, couplings)
    rates = {0: x, 1: x.const(-1)}
    for k, s in zip(ks, sbar):
        rates[k] = rates.get(k, x.zero()) + s.scale(k)
    return {r: a for r, a in rates.items() if not a.is_zero()}


def H0_on_exponential_times(rates: dict[int, Series], v: Series) -> Series:
    """``H_0 = 1/2 sum_{i,j} tt_i tt_j v^(i+j+1)/((i+j+1) i! j!)`` summed in closed form.

    With ``tt_i = sum_r A_r r^i`` the double sum over ``i, j`` collapses to
    ``1/2 sum_{r,q} A_r A_q E(r+q)`` where ``E(0) = v`` and
    ``E(n) = (exp(n v) - 1)/n``.
    """
    cache: dict[int, Series] = {}

    def E(n: int) -> Series:
        if n not in cache:
            cache[n] = v if n == 0 else (series_exp(v.scale(n)) - 1).scale(Q(1, n))
        return cache[n]

    total = v.zero()
    for r, a in rates.items():
        for q, b in rates.items():
            total = total + (a * b * E(r + q)).scale(Q(1, 2))
    return total


def H0_substituted(K: int | None, D: int, couplings: Sequence[int] | None = None,
                   v: Series | None = None) -> Series:
    """``H_0(t(x, s))`` with ``v(t(x, s))`` taken to be ``u = log w``."""
    ks = _resolve(K, couplings)
    if v is None:
        v = solve_u(None, D, ks)
    return H0_on_exponential_times(exponential_times(None, D, ks), v)


def v_equation_residual(v: Series, K: int | None, D: int,
                        couplings: Sequence[int] | None = None) -> Series:
    """``sum_i t_i v^i/i! - v`` at the substituted times, i.e. ``sum_r A_r exp(r v)``."""
    total = v.zero()
    for r, a in exponential_times(K, D, couplings).items():
        total = total + a * series_exp(v.scale(r))
    return total


def genus0_identity_residual(K: int | None, D: int,
                             couplings: Sequence[int] | None = None) -> Series:
    """``H_0(t(x,s)) - F_0 - correction``; identically zero."""
    ks = _resolve(K, couplings)
    w = solve_w(None, D, ks)
    u = series_log(w)
    residual = H0_substituted(None, D, ks, v=u) - F0_closed(None, D, ks, w=w)
    return residual - genus0_correction(None, D, ks)


# -- Frobenius manifold route ----------------------------------------------------

def harmonic(m: int) -> Rational:
    return sum((Q(1, k) for k in range(1, m + 1)), Q(0))


class ExpPoly:
    """Finite sums ``c * u^a v^b exp(m u)``; keys are ``(a, b, m)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Q(c) for k, c in (terms or {}).items() if c != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return ExpPoly(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return ExpPoly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        out: dict = {}
        for (a, b, m), c in self.terms.items():
            for (a2, b2, m2), d in other.terms.items():
                k = (a + a2, b + b2, m + m2)
                out[k] = out.get(k, 0) + c * d
        return ExpPoly(out)

    def d_u(self):
        out: dict = {}
        for (a, b, m), c in self.terms.items():
            if a:
                out[(a - 1, b, m)] = out.get((a - 1, b, m), 0) + a * c
            if m:
                out[(a, b, m)] = out.get((a, b, m), 0) + m * c
        return ExpPoly(out)

    def d_v(self):
        return ExpPoly({(a, b - 1, m): b * c for (a, b, m), c in self.terms.items() if b})

    def at_v0(self) -> "ExpPoly":
        return ExpPoly({k: c for k, c in self.terms.items() if k[1] == 0})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ExpPoly) and self.terms == other.terms

    def evaluate(self, u: Series, v: Series) -> Series:
        total = u.zero()
        for (a, b, m), c in self.terms.items():
            total = total + (u ** a * v ** b * series_exp(u.scale(m))).scale(c)
        return total

    def __repr__(self):
        return f"ExpPoly({self.terms})"


def theta_polys(which: int, p_max: int) -> list[ExpPoly]:
    """Coefficients ``theta_{which,p}``, p <= p_max, as :class:`ExpPoly`.

    theta_1 = -2 e^{zv} sum_m (-u/2 + c_m) e^{mu} z^{2m}/m!^2
    theta_2 = z^{-1} (sum_m e^{mu + zv} z^{2m}/m!^2 - 1)
    """
    out = []
    for p in range(p_max + 1):
        poly: dict = {}
        if which == 2:
            for m in range((p + 1) // 2 + 1):
                j = p + 1 - 2 * m
                if j >= 0:
                    poly[(0, j, m)] = Q(1, factorial(m) ** 2 * factorial(j))
        elif which == 1:
            for m in range(p // 2 + 1):
                j = p - 2 * m
                c = Q(-2, factorial(m) ** 2 * factorial(j))
                poly[(1, j, m)] = poly.get((1, j, m), 0) + c * Q(-1, 2)
                poly[(0, j, m)] = poly.get((0, j, m), 0) + c * harmonic(m)
        else:
            raise ValueError("theta index must be 1 or 2")
        out.append(ExpPoly(poly))
    return out


def theta_coeffs(which: int, p_max: int, u: Series, v: Series) -> list[Series]:
    """``theta_{which,p}(u, v)`` evaluated on series arguments."""
    return [t.evaluate(u, v) for t in theta_polys(which, p_max)]


def omega_generating(alpha: int, beta: int, P: int) -> dict[tuple[int, int], ExpPoly]:
    """Two-point functions ``Omega_{alpha,p;beta,q}`` for p, q <= P.

    Extracted from the generating formula by exact division of the
    numerator by ``z + y``, one homogeneous degree at a time.
    """
    n_max = 2 * P + 1
    ta = theta_polys(alpha, n_max)
    tb = theta_polys(beta, n_max)
    dva, dua = [t.d_v() for t in ta], [t.d_u() for t in ta]
    dvb, dub = [t.d_v() for t in tb], [t.d_u() for t in tb]
    shift = ExpPoly({(0, 0, 0): 1}) if alpha + beta == 3 else ExpPoly()

    def numerator(a: int, b: int) -> ExpPoly:
        n = dva[a] * dub[b] + dua[a] * dvb[b]
        return n - shift if a == b == 0 else n

    if not numerator(0, 0).is_zero():
        raise AlgebraError("generating numerator does not vanish at z = y = 0")
    out = {}
    for d in range(2 * P + 1):
        # N_{d+1}(z, y) = (z + y) Q_d(z, y): q_a = n_a - q_{a-1}, coefficient of z^a y^(d-a)
        prev = ExpPoly()
        for a in range(d + 1):
            q = numerator(a, d + 1 - a) - prev
            if a <= P and d - a <= P:
                out[(a, d - a)] = q
            prev = q
        if not (numerator(d + 1, 0) - prev).is_zero():
            raise AlgebraError(f"numerator not divisible by z + y at degree {d + 1}")
    return out


def omega_even(p: int, q: int) -> LaurentLog:
    """Closed form of ``Omega_{2,p;2,q}`` at ``v = 0`` as a polynomial in ``w``."""
    if p < 0 or q < 0:
        raise ValueError("indices must be non-negative")
    if (p + q) % 2:
        return LaurentLog()
    n = (p + q) // 2
    if p % 2 == 0:
        c = Q(1, (1 + n) * factorial(p // 2) ** 2 * factorial(q // 2) ** 2)
    else:
        a, b = (p + 1) // 2, (q + 1) // 2
        c = Q(a * b, (1 + n) * factorial(a) ** 2 * factorial(b) ** 2)
    return LaurentLog.x_power(n + 1, c)


def omega_at_v0(poly: ExpPoly) -> LaurentLog:
    """Read a ``v = 0`` two-point function as a polynomial in ``w = e^u``."""
    out = {}
    for (a, b, m), c in poly.at_v0().terms.items():
        if a:
            raise AlgebraError("two-point function depends on u beyond e^u")
        out[m] = c
    return LaurentLog(out)


def F0_via_omega(K: int | None, D: int, couplings: Sequence[int] | None = None,
                 w: Series | None = None) -> Series:
    """``F_0`` assembled from two-point functions on the ``v = 0`` branch."""
    ks, x, sbar = coupling_ring(K, D, couplings)
    if w is None:
        w = solve_w(None, D, ks)
    u = series_log(w)
    zero = w.zero()
    P = 2 * max(ks) - 1
    om22 = omega_generating(2, 2, P)
    om12 = omega_generating(1, 2, P)
    om11 = omega_generating(1, 1, P)

    def ev(poly: ExpPoly) -> Series:
        return poly.evaluate(u, zero)

    # (2p)! s_p = (2p)! sbar_p / binomial(2p, p) = p!^2 sbar_p
    scaled = {k: s.scale(factorial(k) ** 2) for k, s in zip(ks, sbar)}
    s1 = scaled.get(1, zero).scale(Q(1, 2))
    total = zero
    higher = [k for k in ks if k >= 2]
    for p in higher:
        for q in higher:
            total = total + (scaled[p] * scaled[q] * ev(om22[(2 * p - 1, 2 * q - 1)])).scale(Q(1, 2))
    for q in ks:
        total = total + x * scaled[q] * ev(om12[(0, 2 * q - 1)])
    total = total - x * ev(om12[(0, 1)])
    one_minus = 1 - s1.scale(2)
    total = total + (one_minus * one_minus * ev(om22[(1, 1)])).scale(Q(1, 2))
    for q in higher:
        total = total + (s1.scale(2) - 1) * scaled[q] * ev(om22[(1, 2 * q - 1)])
    return total + (x * x * ev(om11[(0, 0)])).scale(Q(1, 2))


def euler_lagrange_residuals(w: Series, v: Series, K: int | None, D: int,
                             couplings: Sequence[int] | None = None) -> tuple[Series, Series]:
    """Both Euler-Lagrange equations of the even-coupling GUE, evaluated at ``(w, v)``."""
    ks, x, sbar = coupling_ring(K, D, couplings)
    cmap = CouplingMap(ks)
    first = x - w
    second = -v
    for k, s in zip(ks, sbar):
        coupling = s.scale(Q(factorial(2 * k), cmap.factor(k)))
        inner1 = w.zero()
        for m in range(1, k + 1):
            inner1 = inner1 + (w ** m * v ** (2 * k - 2 * m)).scale(
                Q(m, factorial(2 * k - 2 * m) * factorial(m) ** 2))
        inner2 = w.zero()
        for m in range(k):
            inner2 = inner2 + (w ** m * v ** (2 * k - 1 - 2 * m)).scale(
                Q(1, factorial(2 * k - 1 - 2 * m) * factorial(m) ** 2))
        first = first + coupling * inner1
        second = second + coupling * inner2
    return first, second
