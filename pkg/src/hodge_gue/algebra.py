"""Exact coefficient rings and truncated multivariate power series.

The scalar field is :data:`Rational` (``gmpy2.mpq``).  On top of it sit

* :class:`LaurentLog`: Laurent polynomials in ``x`` plus a Laurent
  polynomial multiple of ``log x``;
* :class:`Series`: truncated power series in named variables whose
  coefficients live in :class:`LaurentLog`;
* :class:`GenusSeries`: finite maps ``g -> Series`` standing for
  ``sum_g eps^(2g-2) * entries[g]``.

Truncation is by weighted total degree: each variable carries a
non-negative integer weight (default 1) and only monomials of weighted
degree ``<= degree`` are kept.  Because the weights are non-negative the
kept monomials form a lower set, so every ring operation is exact on
every kept coefficient.

Products in which both factors carry ``log x`` raise :class:`LogSquaredError`;
``log(x)^2`` never arises in the computations this package performs.
"""
from __future__ import annotations

from operator import add
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import gmpy2

Rational = type(gmpy2.mpq())

__all__ = [
    "Rational",
    "Q",
    "format_rational",
    "parse_rational",
    "AlgebraError",
    "LogSquaredError",
    "TruncationError",
    "LaurentLog",
    "Series",
    "GenusSeries",
    "series_log",
    "series_exp",
    "fixed_point_solve",
    "coefficient",
]

_ZERO = gmpy2.mpq(0)
_ONE = gmpy2.mpq(1)


def Q(p, q=1) -> Rational:
    """Build an exact rational from ints, strings or other rationals."""
    if q == 1:
        return gmpy2.mpq(p)
    return gmpy2.mpq(p, q)


def format_rational(r) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(gmpy2.mpq(r))


def parse_rational(text: str) -> Rational:
    return gmpy2.mpq(text.strip())


class AlgebraError(ArithmeticError):
    pass


class LogSquaredError(AlgebraError):
    pass


class TruncationError(AlgebraError):
    pass


def _clean(d: Mapping[int, object]) -> dict[int, Rational]:
    return {k: gmpy2.mpq(v) for k, v in d.items() if v != 0}


class LaurentLog:
    """``sum_e p_e x^e + log(x) * sum_e l_e x^e`` with rational coefficients."""

    __slots__ = ("poly", "logpart")

    def __init__(self, poly: Mapping[int, object] | None = None,
                 logpart: Mapping[int, object] | None = None):
        self.poly = _clean(poly or {})
        self.logpart = _clean(logpart or {})

    @classmethod
    def x_power(cls, e: int, c=1) -> "LaurentLog":
        return cls({e: c})

    @classmethod
    def log_x(cls, c=1) -> "LaurentLog":
        return cls({}, {0: c})

    @classmethod
    def coerce(cls, value) -> "LaurentLog":
        if isinstance(value, LaurentLog):
            return value
        return cls({0: value})

    def is_zero(self) -> bool:
        return not self.poly and not self.logpart

    def has_log(self) -> bool:
        return bool(self.logpart)

    def __eq__(self, other):
        if not isinstance(other, LaurentLog):
            try:
                other = LaurentLog.coerce(gmpy2.mpq(other))
            except TypeError:
                return NotImplemented
        return self.poly == other.poly and self.logpart == other.logpart

    def __hash__(self):
        return hash((frozenset(self.poly.items()), frozenset(self.logpart.items())))

    @staticmethod
    def _merge(a, b, sign=1):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, _ZERO) + sign * v
        return out

    def __add__(self, other):
        other = LaurentLog.coerce(other)
        return LaurentLog(self._merge(self.poly, other.poly),
                          self._merge(self.logpart, other.logpart))

    __radd__ = __add__

    def __sub__(self, other):
        other = LaurentLog.coerce(other)
        return LaurentLog(self._merge(self.poly, other.poly, -1),
                          self._merge(self.logpart, other.logpart, -1))

    def __rsub__(self, other):
        return LaurentLog.coerce(other) - self

    def __neg__(self):
        return LaurentLog({k: -v for k, v in self.poly.items()},
                          {k: -v for k, v in self.logpart.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentLog):
            c = gmpy2.mpq(other)
            return LaurentLog({k: c * v for k, v in self.poly.items()},
                              {k: c * v for k, v in self.logpart.items()})
        if self.logpart and other.logpart:
            raise LogSquaredError("product would contain log(x)^2")
        poly: dict[int, Rational] = {}
        logpart: dict[int, Rational] = {}
        for e, c in self.poly.items():
            for f, d in other.poly.items():
                poly[e + f] = poly.get(e + f, _ZERO) + c * d
            for f, d in other.logpart.items():
                logpart[e + f] = logpart.get(e + f, _ZERO) + c * d
        for e, c in self.logpart.items():
            for f, d in other.poly.items():
                logpart[e + f] = logpart.get(e + f, _ZERO) + c * d
        return LaurentLog(poly, logpart)

    __rmul__ = __mul__

    def derivative(self) -> "LaurentLog":
        """d/dx, with (log x)' = 1/x."""
        poly: dict[int, Rational] = {}
        logpart: dict[int, Rational] = {}
        for e, c in self.poly.items():
            if e:
                poly[e - 1] = poly.get(e - 1, _ZERO) + e * c
        for e, c in self.logpart.items():
            if e:
                logpart[e - 1] = logpart.get(e - 1, _ZERO) + e * c
            poly[e - 1] = poly.get(e - 1, _ZERO) + c
        return LaurentLog(poly, logpart)

    def monomial(self) -> tuple[Rational, int] | None:
        """``(c, m)`` if this is exactly ``c * x^m``, else ``None``."""
        if self.logpart or len(self.poly) != 1:
            return None
        (m, c), = self.poly.items()
        return c, m

    def to_text(self) -> str:
        parts = []
        for e in sorted(self.poly):
            parts.append(_term_text(self.poly[e], e, False))
        for e in sorted(self.logpart):
            parts.append(_term_text(self.logpart[e], e, True))
        return " + ".join(parts) if parts else "0"

    __str__ = to_text

    def __repr__(self):
        return f"LaurentLog({self.to_text()})"


def _term_text(c, e: int, log: bool) -> str:
    factors = [format_rational(c)]
    if e:
        factors.append("x" if e == 1 else f"x^{e}")
    if log:
        factors.append("log(x)")
    return "*".join(factors)


# Series terms are keyed by (exponent tuple, x-power, log-power).
_Key = tuple


class Series:
    """Truncated power series in ``variables`` over :class:`LaurentLog`.

    ``weights[i]`` is the grading weight of ``variables[i]``; monomials
    whose weighted degree exceeds ``degree`` are discarded.  Instances are
    immutable.
    """

    __slots__ = ("variables", "weights", "degree", "_terms", "_buckets", "_hash")

    def __init__(self, variables: Sequence[str], degree: int,
                 terms: Mapping[_Key, object] | None = None,
                 weights: Sequence[int] | None = None, *, _trusted: bool = False):
        self.variables = tuple(variables)
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.variables)
        if len(self.weights) != len(self.variables):
            raise ValueError("one weight per variable")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if degree < 0:
            raise ValueError("truncation degree must be >= 0")
        self.degree = degree
        if _trusted:
            self._terms = terms
        else:
            clean = {}
            for (alpha, e, l), c in (terms or {}).items():
                alpha = tuple(alpha)
                if len(alpha) != len(self.variables):
                    raise ValueError(f"multi-index {alpha} has wrong length")
                if l not in (0, 1):
                    raise LogSquaredError("only first powers of log(x) are allowed")
                if c != 0 and self._wdeg(alpha) <= degree:
                    clean[(alpha, e, l)] = gmpy2.mpq(c)
            self._terms = clean
        self._buckets = None
        self._hash = None

    # -- construction -----------------------------------------------------

    def _like(self, terms, degree=None) -> "Series":
        return Series(self.variables, self.degree if degree is None else degree,
                      terms, self.weights, _trusted=True)

    @classmethod
    def constant(cls, variables, degree, value=1, weights=None) -> "Series":
        zero = (0,) * len(variables)
        value = LaurentLog.coerce(value)
        terms = {(zero, e, 0): c for e, c in value.poly.items()}
        terms.update({(zero, e, 1): c for e, c in value.logpart.items()})
        return cls(variables, degree, terms, weights)

    @classmethod
    def variable(cls, variables, degree, name: str, weights=None) -> "Series":
        i = list(variables).index(name)
        alpha = tuple(int(j == i) for j in range(len(variables)))
        return cls(variables, degree, {(alpha, 0, 0): 1}, weights)

    def const(self, value) -> "Series":
        """A constant series in the same ring as ``self``."""
        return Series.constant(self.variables, self.degree, value, self.weights)

    def var(self, name: str) -> "Series":
        return Series.variable(self.variables, self.degree, name, self.weights)

    def zero(self) -> "Series":
        return self._like({})

    # -- inspection -------------------------------------------------------

    def _wdeg(self, alpha) -> int:
        return sum(a * w for a, w in zip(alpha, self.weights))

    @property
    def terms(self) -> dict[tuple, LaurentLog]:
        """Multi-index -> :class:`LaurentLog` coefficient (fresh dict)."""
        grouped: dict[tuple, list] = {}
        for (alpha, e, l), c in self._terms.items():
            poly, logpart = grouped.setdefault(alpha, ({}, {}))
            (logpart if l else poly)[e] = c
        return {a: LaurentLog(p, lp) for a, (p, lp) in grouped.items()}

    def raw_terms(self) -> dict[_Key, Rational]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple, LaurentLog]]:
        return iter(sorted(self.terms.items()))

    def coefficient(self, alpha: Sequence[int] | Mapping[str, int]) -> LaurentLog:
        alpha = self._index(alpha)
        if self._wdeg(alpha) > self.degree:
            raise TruncationError(f"multi-index {alpha} is beyond truncation {self.degree}")
        poly = {e: c for (a, e, l), c in self._terms.items() if a == alpha and not l}
        logpart = {e: c for (a, e, l), c in self._terms.items() if a == alpha and l}
        return LaurentLog(poly, logpart)

    def _index(self, alpha) -> tuple:
        if isinstance(alpha, Mapping):
            unknown = set(alpha) - set(self.variables)
            if unknown:
                raise KeyError(f"unknown variables {sorted(unknown)}")
            return tuple(alpha.get(v, 0) for v in self.variables)
        alpha = tuple(alpha)
        if len(alpha) != len(self.variables):
            raise ValueError(f"multi-index {alpha} has wrong length")
        return alpha

    def is_zero(self) -> bool:
        return not self._terms

    def has_log(self) -> bool:
        return any(l for (_, _, l) in self._terms)

    def min_degree(self) -> int | None:
        """Smallest weighted degree carrying a nonzero term."""
        if not self._terms:
            return None
        return min(self._wdeg(a) for (a, _, _) in self._terms)

    def degree_part(self, d: int) -> "Series":
        return self._like({k: c for k, c in self._terms.items() if self._wdeg(k[0]) == d})

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Series):
            return (self.variables == other.variables and self.weights == other.weights
                    and self.degree == other.degree and self._terms == other._terms)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, self.weights, self.degree,
                               frozenset(self._terms.items())))
        return self._hash

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "Series") -> int:
        if self.variables != other.variables or self.weights != other.weights:
            raise ValueError("series live in different rings")
        return min(self.degree, other.degree)

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return self.const(other)

    def _restricted(self, degree):
        if degree == self.degree:
            return self._terms
        return {k: c for k, c in self._terms.items() if self._wdeg(k[0]) <= degree}

    def __add__(self, other):
        other = self._coerce(other)
        degree = self._check(other)
        out = dict(self._restricted(degree))
        for k, c in other._restricted(degree).items():
            s = out.get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self._like(out, degree)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Series":
        c = gmpy2.mpq(c)
        if not c:
            return self.zero()
        return self._like({k: c * v for k, v in self._terms.items()})

    def _bucketed(self):
        if self._buckets is None:
            buckets = [[] for _ in range(self.degree + 1)]
            for (alpha, e, l), c in self._terms.items():
                buckets[self._wdeg(alpha)].append((alpha, e, l, c))
            self._buckets = buckets
        return self._buckets

    def __mul__(self, other):
        if isinstance(other, LaurentLog):
            other = self.const(other)
        elif not isinstance(other, Series):
            return self.scale(other)
        degree = self._check(other)
        left = self._bucketed()
        right = other._bucketed()
        out: dict[_Key, Rational] = {}
        get = out.get
        for da in range(degree + 1):
            la = left[da] if da < len(left) else ()
            if not la:
                continue
            for db in range(degree - da + 1):
                rb = right[db] if db < len(right) else ()
                for alpha, e, l, c in la:
                    for beta, f, m, d in rb:
                        lm = l + m
                        if lm > 1:
                            raise LogSquaredError("product would contain log(x)^2")
                        key = (tuple(map(add, alpha, beta)), e + f, lm)
                        out[key] = get(key, _ZERO) + c * d
        return self._like({k: c for k, c in out.items() if c}, degree)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        if isinstance(other, LaurentLog):
            return self * self.const(other).inverse()
        return self.scale(1 / gmpy2.mpq(other))

    def truncate(self, degree: int) -> "Series":
        if degree > self.degree:
            raise TruncationError("cannot raise truncation degree")
        return self._like(self._restricted(degree), degree)

    # -- units, log, exp ----------------------------------------------------

    def _unit_split(self) -> tuple[Rational, int, "Series"]:
        """Write self = c x^m (1 + r) with r nilpotent; return (c, m, r)."""
        head = {k: c for k, c in self._terms.items() if self._wdeg(k[0]) == 0}
        zero = (0,) * len(self.variables)
        if len(head) != 1:
            raise AlgebraError("leading term is not a single monomial c*x^m")
        (alpha, m, l), c = next(iter(head.items()))
        if alpha != zero or l:
            raise AlgebraError("leading term is not a single monomial c*x^m")
        r = self * self.const(LaurentLog.x_power(-m, 1 / c)) - 1
        return c, m, r

    def inverse(self) -> "Series":
        c, m, r = self._unit_split()
        # 1/(1+r) = sum (-r)^n, r has positive weighted degree
        acc = self.const(1)
        for _ in range(self.degree):
            acc = 1 - r * acc
        return acc * self.const(LaurentLog.x_power(-m, 1 / c))

    def derivative_x(self) -> "Series":
        out: dict[_Key, Rational] = {}
        for (alpha, e, l), c in self._terms.items():
            if e:
                k = (alpha, e - 1, l)
                out[k] = out.get(k, _ZERO) + e * c
            if l:
                k = (alpha, e - 1, 0)
                out[k] = out.get(k, _ZERO) + c
        return self._like({k: c for k, c in out.items() if c})

    def derivative(self, name: str) -> "Series":
        """Partial derivative in a series variable; truncation drops by its weight."""
        i = self.variables.index(name)
        degree = self.degree - self.weights[i]
        if degree < 0:
            raise TruncationError("derivative leaves nothing within truncation")
        out = {}
        for (alpha, e, l), c in self._terms.items():
            if alpha[i]:
                beta = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
                if self._wdeg(beta) <= degree:
                    out[(beta, e, l)] = alpha[i] * c
        return self._like(out, degree)

    def map_monomials(self, factor: Callable[[tuple], object]) -> "Series":
        """Multiply the coefficient of each monomial ``alpha`` by ``factor(alpha)``."""
        out = {}
        cache: dict[tuple, Rational] = {}
        for (alpha, e, l), c in self._terms.items():
            f = cache.get(alpha)
            if f is None:
                f = cache[alpha] = gmpy2.mpq(factor(alpha))
            if f:
                out[(alpha, e, l)] = c * f
        return self._like(out)

    def without_constant(self) -> "Series":
        """Drop the x- and s-independent, log-free coefficient."""
        zero = (0,) * len(self.variables)
        return self._like({k: c for k, c in self._terms.items() if k != (zero, 0, 0)})

    # -- printing -------------------------------------------------------------

    def monomial_text(self, alpha: tuple) -> str:
        factors = [name if a == 1 else f"{name}^{a}"
                   for name, a in zip(self.variables, alpha) if a]
        return "*".join(factors) or "1"

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for alpha, coef in self.items():
            mono = self.monomial_text(alpha)
            parts.append(f"({coef.to_text()})" + ("" if mono == "1" else f"*{mono}"))
        return " + ".join(parts) + f" + O(deg {self.degree + 1})"

    def __repr__(self):
        return f"Series[{', '.join(self.variables)}]({self.to_text()})"


def series_log(a: Series) -> Series:
    """``m*log(x) + log(1 + r)`` for ``a = x^m (1 + r)``."""
    try:
        c, m, r = a._unit_split()
    except AlgebraError as exc:
        raise AlgebraError("non-unital leading term") from exc
    if c != 1:
        raise AlgebraError("non-unital leading term")
    if r.has_log():
        raise LogSquaredError("log of a series already containing log(x)")
    # Horner form of sum_{n>=1} (-1)^(n+1) r^n / n
    acc = a.zero()
    for n in range(a.degree, 0, -1):
        acc = r * (acc + Q((-1) ** (n + 1), n))
    return acc + a.const(LaurentLog.log_x(m))


def series_exp(a: Series) -> Series:
    """exp of ``m*log(x) + b`` with integer ``m`` and nilpotent log-free ``b``."""
    zero = (0,) * len(a.variables)
    m = 0
    rest = {}
    for (alpha, e, l), c in a._terms.items():
        if l:
            if alpha != zero or e != 0 or c.denominator != 1:
                raise AlgebraError("exp needs the log part to be an integer multiple of log(x)")
            m = int(c)
        else:
            if a._wdeg(alpha) == 0:
                raise AlgebraError("exp argument must have no degree-0 part besides m*log(x)")
            rest[(alpha, e, l)] = c
    b = a._like(rest)
    acc = a.const(1)
    for n in range(a.degree, 0, -1):
        acc = 1 + b * acc.scale(Q(1, n))
    return acc * a.const(LaurentLog.x_power(m))


def fixed_point_solve(f: Callable[[Series], Series], seed: Series,
                      degree: int | None = None) -> Series:
    """Iterate ``s -> f(s)`` from ``seed`` until it stabilises at truncation ``degree``.

    ``f`` must be a graded contraction.  Each step fixes at least one more
    degree, so ``degree + 1`` steps suffice; otherwise an error is raised.
    """
    if degree is not None and degree != seed.degree:
        seed = seed.truncate(degree) if degree < seed.degree else Series(
            seed.variables, degree, seed.raw_terms(), seed.weights)
    current = seed
    for _ in range(seed.degree + 2):
        nxt = f(current)
        if nxt == current:
            return current
        current = nxt
    raise AlgebraError(
        f"fixed-point iteration did not converge within {seed.degree + 1} steps "
        "(map is not a graded contraction)")


def coefficient(a: Series, alpha) -> LaurentLog:
    return a.coefficient(alpha)


class GenusSeries:
    """``sum_g eps^(2g-2) * entries[g]``; linear operations act entrywise."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[int, Series]):
        if any(g < 0 for g in entries):
            raise ValueError("genus must be non-negative")
        self.entries = dict(entries)

    def __getitem__(self, g: int) -> Series:
        return self.entries[g]

    def __contains__(self, g):
        return g in self.entries

    def genera(self) -> list[int]:
        return sorted(self.entries)

    def _combine(self, other: "GenusSeries", sign: int) -> "GenusSeries":
        out = dict(self.entries)
        for g, s in other.entries.items():
            out[g] = out[g] + s.scale(sign) if g in out else s.scale(sign)
        return GenusSeries(out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "GenusSeries":
        return GenusSeries({g: s.scale(c) for g, s in self.entries.items()})

    def apply(self, fn: Callable[[Series], Series]) -> "GenusSeries":
        return GenusSeries({g: fn(s) for g, s in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, GenusSeries):
            return NotImplemented
        gs = set(self.entries) | set(other.entries)
        for g in gs:
            a, b = self.entries.get(g), other.entries.get(g)
            if a is None or b is None:
                if not (a or b).is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __repr__(self):
        return f"GenusSeries({self.entries!r})"


def sum_series(items: Iterable[Series], like: Series) -> Series:
    total = like.zero()
    for s in items:
        total = total + s
    return total
