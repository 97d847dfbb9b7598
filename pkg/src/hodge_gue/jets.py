"""Differential polynomials in jet variables.

A :class:`JetFunction` is a finite sum of monomials in ``v, v_1, v_2, ...``
(``v_1`` may carry negative exponents) plus a rational multiple of
``log v_1``.  ``D_0 = v_1 d/dv + sum_k v_{k+1} d/dv_k`` is the total
x-derivative on jets; :func:`jet_substitute` evaluates a jet function on
a series ``u`` with ``v_k -> d^k u/dx^k``, so that
``jet_substitute(d0(f)) == d/dx jet_substitute(f)``.

The genus-1 and genus-2 Hodge free energies and the genus 1..5 GUE free
energies ship as data files in canonical text form, one term per line::

    <p/q> <monomial>        e.g.  -7/1920 v1^-3*v2*v3
    <p/q> log(v1)
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources
from math import factorial
from typing import Iterable, Mapping

from .algebra import GenusSeries, Q, Rational, Series, format_rational, parse_rational, series_log

__all__ = [
    "JetFunction",
    "JetError",
    "builtin_H",
    "builtin_F",
    "d0",
    "jet_substitute",
    "jet_series",
    "cosh_weight",
    "cosh_apply",
]

Monomial = tuple  # ((index, exponent), ...) sorted by index, exponents nonzero


class JetError(ValueError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for i, e in b:
        d[i] = d.get(i, 0) + e
    return tuple(sorted((i, e) for i, e in d.items() if e))


def _mono_text(m: Monomial) -> str:
    parts = []
    for i, e in m:
        name = "v" if i == 0 else f"v{i}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) or "1"


def _parse_mono(text: str) -> Monomial:
    if text == "1":
        return ()
    d: dict[int, int] = {}
    for factor in text.split("*"):
        name, _, exp = factor.partition("^")
        if not name.startswith("v"):
            raise JetError(f"bad jet variable {factor!r}")
        i = int(name[1:]) if len(name) > 1 else 0
        d[i] = d.get(i, 0) + (int(exp) if exp else 1)
    return tuple(sorted((i, e) for i, e in d.items() if e))


def _sort_key(m: Monomial):
    return (max((i for i, _ in m), default=0), m)


class JetFunction:
    """``sum c_m v^m + logcoef * log(v1)``, immutable and canonical."""

    __slots__ = ("rat", "logcoef")

    def __init__(self, rat: Mapping[Monomial, object] | None = None, logcoef=0):
        clean = {}
        for m, c in (rat or {}).items():
            if c == 0:
                continue
            for i, e in m:
                if i < 0 or (e < 0 and i != 1):
                    raise JetError(f"only v1 may carry negative exponents: {m}")
            clean[tuple(m)] = Q(c)
        self.rat = clean
        self.logcoef = Q(logcoef)

    # -- construction -------------------------------------------------------

    @classmethod
    def var(cls, k: int, exponent: int = 1) -> "JetFunction":
        return cls({((k, exponent),): 1})

    @classmethod
    def constant(cls, c) -> "JetFunction":
        return cls({(): c})

    @classmethod
    def log_v1(cls, c=1) -> "JetFunction":
        return cls({}, c)

    @classmethod
    def from_text(cls, text: str) -> "JetFunction":
        rat: dict[Monomial, Rational] = {}
        logcoef = Q(0)
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coef, _, mono = line.partition(" ")
            c = parse_rational(coef)
            mono = mono.strip()
            if mono == "log(v1)":
                logcoef += c
                continue
            m = _parse_mono(mono)
            rat[m] = rat.get(m, 0) + c
        return cls(rat, logcoef)

    # -- text forms -------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical form: one ``<p/q> <monomial>`` line per term, sorted."""
        lines = [f"{format_rational(self.rat[m])} {_mono_text(m)}"
                 for m in sorted(self.rat, key=_sort_key)]
        if self.logcoef:
            lines.append(f"{format_rational(self.logcoef)} log(v1)")
        return "\n".join(lines) + "\n"

    def __str__(self):
        parts = [f"{format_rational(self.rat[m])}*{_mono_text(m)}"
                 for m in sorted(self.rat, key=_sort_key)]
        if self.logcoef:
            parts.append(f"{format_rational(self.logcoef)}*log(v1)")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"JetFunction({self})"

    # -- inspection ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, JetFunction):
            return NotImplemented
        return self.rat == other.rat and self.logcoef == other.logcoef

    def __hash__(self):
        return hash((frozenset(self.rat.items()), self.logcoef))

    def __len__(self):
        return len(self.rat) + bool(self.logcoef)

    def is_zero(self) -> bool:
        return not self.rat and not self.logcoef

    def is_constant(self) -> bool:
        return not self.logcoef and all(m == () for m in self.rat)

    def coefficient(self, monomial: str | Monomial) -> Rational:
        if isinstance(monomial, str):
            if monomial == "log(v1)":
                return self.logcoef
            monomial = _parse_mono(monomial)
        return self.rat.get(tuple(monomial), Q(0))

    def max_index(self) -> int:
        idx = max((i for m in self.rat for i, _ in m), default=0)
        return max(idx, 1) if self.logcoef else idx

    def depends_on_v(self) -> bool:
        return any(i == 0 for m in self.rat for i, _ in m)

    def v1_exponents(self) -> set[int]:
        return {dict(m).get(1, 0) for m in self.rat}

    def x_weights(self) -> set[int]:
        """Values of ``sum_k k e_k`` over the monomials (v_k scales as x^-k)."""
        return {sum(i * e for i, e in m) for m in self.rat}

    def is_quasi_polynomial(self) -> bool:
        """No ``v``, no ``log v1``; polynomial in v_2.. over Laurent polynomials in v_1."""
        return not self.logcoef and not self.depends_on_v()

    def monomials(self) -> list[Monomial]:
        return sorted(self.rat, key=_sort_key)

    # -- algebra --------------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        rat = dict(self.rat)
        for m, c in other.rat.items():
            rat[m] = rat.get(m, 0) + c
        return JetFunction(rat, self.logcoef + other.logcoef)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> "JetFunction":
        c = Q(c)
        return JetFunction({m: c * v for m, v in self.rat.items()}, c * self.logcoef)

    def __mul__(self, other):
        if not isinstance(other, JetFunction):
            return self.scale(other)
        for a, b in ((self, other), (other, self)):
            if a.logcoef and not b.is_constant():
                raise JetError("log(v1) times a non-constant is not a JetFunction")
        rat: dict[Monomial, Rational] = {}
        for m1, c1 in self.rat.items():
            for m2, c2 in other.rat.items():
                m = _mono_mul(m1, m2)
                rat[m] = rat.get(m, 0) + c1 * c2
        logcoef = (self.logcoef * other.rat.get((), 0)) + (other.logcoef * self.rat.get((), 0))
        return JetFunction(rat, logcoef)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.rat) == 1 and not self.logcoef:
                (m, c), = self.rat.items()
                return JetFunction({tuple((i, e * n) for i, e in m): 1 / c ** (-n)})
            raise JetError("negative powers only for monomials")
        result = JetFunction.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def d0(self) -> "JetFunction":
        return d0(self)


def _coerce(value) -> JetFunction:
    return value if isinstance(value, JetFunction) else JetFunction.constant(value)


def d0(f: JetFunction) -> JetFunction:
    """Total derivative ``D_0 = v_1 d/dv + sum_k v_{k+1} d/dv_k``."""
    rat: dict[Monomial, Rational] = {}
    for m, c in f.rat.items():
        for i, e in m:
            # e * v_i^(e-1) * v_{i+1}
            new = _mono_mul(_mono_mul(m, ((i, -1),)), ((i + 1, 1),))
            rat[new] = rat.get(new, 0) + e * c
    if f.logcoef:
        m = ((1, -1), (2, 1))
        rat[m] = rat.get(m, 0) + f.logcoef
    return JetFunction(rat)


def d0_power(f: JetFunction, n: int) -> JetFunction:
    for _ in range(n):
        f = d0(f)
    return f


@lru_cache(maxsize=None)
def _load(name: str) -> JetFunction:
    text = resources.files("hodge_gue").joinpath("data").joinpath(f"{name}.jet").read_text()
    return JetFunction.from_text(text)


def builtin_H(g: int) -> JetFunction:
    """Genus-1 and genus-2 cubic Hodge free energies in jet variables."""
    if g not in (1, 2):
        raise JetError(f"no built-in H_{g}; genus 3..5 come from derive_H")
    return _load(f"H{g}")


def builtin_F(g: int) -> JetFunction:
    """Genus 1..5 even-coupling GUE free energies in jet variables (constants dropped)."""
    if not 1 <= g <= 5:
        raise JetError(f"no built-in F_{g}; available genera are 1..5")
    return _load(f"F{g}")


def max_jet_index(g: int) -> int:
    return 3 * g - 2


# -- substitution -------------------------------------------------------------------

def jet_series(u: Series, n: int) -> list[Series]:
    """``[u, u_x, ..., d^n u/dx^n]``."""
    out = [u]
    for _ in range(n):
        out.append(out[-1].derivative_x())
    return out


class _PowerCache:
    def __init__(self, jets: list[Series]):
        self.jets = jets
        self.cache: dict[tuple[int, int], Series] = {}
        self._inv = None

    def power(self, i: int, e: int) -> Series:
        key = (i, e)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if e == 1:
            val = self.jets[i]
        elif e == -1:
            try:
                val = self.jets[i].inverse()
            except ArithmeticError as exc:
                raise JetError(f"v{i} image is not invertible") from exc
        else:
            half = e // 2 if e > 0 else -((-e) // 2)
            val = self.power(i, half) * self.power(i, e - half)
        self.cache[key] = val
        return val


def jet_substitute(f: JetFunction, u: Series, jets: list[Series] | None = None) -> Series:
    """Evaluate ``f`` at ``v = u, v_k = d^k u/dx^k``."""
    n = f.max_index()
    if jets is None or len(jets) <= n:
        jets = jet_series(u, max(n, 1))
    cache = _PowerCache(jets)
    total = u.zero()
    for m in sorted(f.rat, key=_sort_key):
        c = f.rat[m]
        term = None
        for i, e in m:
            p = cache.power(i, e)
            term = p if term is None else term * p
        term = u.const(1) if term is None else term
        total = total + term.scale(c)
    if f.logcoef:
        total = total + series_log(jets[1]).scale(f.logcoef)
    return total


# -- cosh(eps d_x / 2) ------------------------------------------------------------------

def cosh_weight(n: int) -> Rational:
    """Coefficient ``1/(2^(2n) (2n)!)`` of ``eps^(2n) d_x^(2n)``."""
    return Q(1, 4 ** n * factorial(2 * n))


def cosh_apply(G: GenusSeries) -> GenusSeries:
    """``(result)_g = sum_{n <= g} cosh_weight(n) d_x^(2n) G_{g-n}``."""
    if not G.entries:
        return GenusSeries({})
    top = max(G.genera())
    out = {}
    for g in range(top + 1):
        total = None
        for n in range(g + 1):
            if g - n not in G:
                continue
            s = G[g - n]
            for _ in range(2 * n):
                s = s.derivative_x()
            s = s.scale(cosh_weight(n))
            total = s if total is None else total + s
        if total is not None:
            out[g] = total
    return GenusSeries(out)


def sum_jets(items: Iterable[JetFunction]) -> JetFunction:
    total = JetFunction()
    for f in items:
        total = total + f
    return total
