import pytest
from hypothesis import given, settings, strategies as st

from hodge_gue.algebra import (
    AlgebraError,
    GenusSeries,
    LaurentLog,
    LogSquaredError,
    Q,
    Series,
    TruncationError,
    fixed_point_solve,
    format_rational,
    parse_rational,
    series_exp,
    series_log,
)

VARS = ("a", "b")
DEG = 4
PROPS = settings(max_examples=100, deadline=None)

rationals = st.builds(lambda p, q: Q(p, q), st.integers(-6, 6), st.integers(1, 4))


def _alphas():
    return [(i, j) for i in range(DEG + 1) for j in range(DEG + 1 - i)]


@st.composite
def laurent(draw, logs=False):
    poly = draw(st.dictionaries(st.integers(-2, 2), rationals, max_size=3))
    logpart = draw(st.dictionaries(st.integers(-2, 2), rationals, max_size=2)) if logs else {}
    return LaurentLog(poly, logpart)


@st.composite
def series(draw, logs=False, nilpotent=False):
    terms = {}
    for alpha in draw(st.lists(st.sampled_from(_alphas()), max_size=5, unique=True)):
        if nilpotent and alpha == (0, 0):
            continue
        c = draw(laurent(logs))
        for e, v in c.poly.items():
            terms[(alpha, e, 0)] = v
        for e, v in c.logpart.items():
            terms[(alpha, e, 1)] = v
    return Series(VARS, DEG, terms)


def unit(nil: Series, m: int) -> Series:
    """``x^m (1 + nil)``."""
    return nil.const(LaurentLog.x_power(m)) * (nil + 1)


# -- rationals and LaurentLog ---------------------------------------------------

def test_rational_text_round_trip():
    assert format_rational(Q(-3, 6)) == "-1/2"
    assert format_rational(Q(4)) == "4"
    assert parse_rational("-1/2") == Q(-1, 2)
    assert parse_rational(" 7 ") == Q(7)


def test_laurent_log_square_is_rejected():
    with pytest.raises(LogSquaredError):
        LaurentLog.log_x() * LaurentLog.log_x()


def test_laurent_log_derivative_of_x_log_x():
    f = LaurentLog({}, {1: 1})
    assert f.derivative() == LaurentLog({0: 1}, {0: 1})
    assert LaurentLog.log_x().derivative() == LaurentLog.x_power(-1)


def test_laurent_monomial():
    assert LaurentLog.x_power(3, Q(1, 3)).monomial() == (Q(1, 3), 3)
    assert LaurentLog({0: 1, 1: 1}).monomial() is None
    assert LaurentLog.log_x().monomial() is None


@PROPS
@given(laurent(logs=True), laurent(), laurent())
def test_laurent_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentLog()


@PROPS
@given(laurent(logs=True), laurent())
def test_laurent_leibniz(a, b):
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


# -- series ----------------------------------------------------------------------------

def test_truncation_drops_high_degree():
    a = Series.variable(VARS, 2, "a")
    assert (a * a * a).is_zero()
    with pytest.raises(TruncationError):
        a.coefficient((3, 0))


def test_weighted_truncation():
    s = Series.variable(("h", "t"), 2, "h", weights=(1, 0))
    t = s.var("t")
    p = (s + t) ** 3
    assert p.coefficient((2, 1)) == LaurentLog.x_power(0, 3)
    assert p.coefficient((0, 3)) == LaurentLog.x_power(0, 1)


def test_mismatched_rings_raise():
    with pytest.raises(ValueError):
        Series.variable(VARS, 2, "a") + Series.variable(("a",), 2, "a")


def test_coefficient_by_name():
    s = Series.variable(VARS, 2, "b").scale(5)
    assert s.coefficient({"b": 1}) == LaurentLog.x_power(0, 5)


def test_geometric_inverse():
    a = Series.variable(VARS, 4, "a")
    inv = (1 - a).inverse()
    assert inv == sum((a ** n for n in range(5)), a.zero())


def test_non_unital_log_raises():
    a = Series.variable(VARS, 2, "a")
    with pytest.raises(AlgebraError):
        series_log(a + 2)


def test_fixed_point_catalan():
    # c = 1 + a c^2 has Catalan coefficients
    a = Series.variable(("a",), 6, "a")
    c = fixed_point_solve(lambda c: 1 + a * c * c, a.const(1))
    assert [c.coefficient((n,)).poly[0] for n in range(7)] == [1, 1, 2, 5, 14, 42, 132]


@PROPS
@given(series(logs=True), series(), series())
def test_series_ring_laws(a, b, c):
    assert a + b == b + a
    assert b * c == c * b
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    assert a * 1 == a


@PROPS
@given(series(logs=True), series())
def test_series_derivations(a, b):
    assert (a * b).derivative_x() == a.derivative_x() * b + a * b.derivative_x()
    lhs = (a * b).derivative("a")
    rhs = a.derivative("a") * b.truncate(DEG - 1) + a.truncate(DEG - 1) * b.derivative("a")
    assert lhs == rhs
    assert a.derivative("a").derivative("b") == a.derivative("b").derivative("a")


@PROPS
@given(series(nilpotent=True), st.integers(-2, 2))
def test_exp_log_round_trip(nil, m):
    u = unit(nil, m)
    assert series_exp(series_log(u)) == u
    assert series_log(series_exp(nil)) == nil


@PROPS
@given(series(nilpotent=True), series(nilpotent=True))
def test_log_is_additive(a, b):
    ua, ub = unit(a, 1), unit(b, -1)
    assert series_log(ua * ub) == series_log(ua) + series_log(ub)


@PROPS
@given(series(nilpotent=True), st.integers(-2, 2))
def test_inverse(nil, m):
    u = unit(nil, m).scale(Q(3, 2))
    assert u * u.inverse() == u.const(1)


def test_genus_series_arithmetic():
    a = Series.variable(VARS, 2, "a")
    G = GenusSeries({0: a, 2: a * a})
    H = GenusSeries({0: a})
    diff = G - H
    assert diff[0].is_zero() and diff[2] == a * a
    assert G.scale(2)[2] == (a * a).scale(2)
