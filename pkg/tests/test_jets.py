import pytest
from hypothesis import given, settings, strategies as st

from hodge_gue.algebra import LaurentLog, Q, Series, series_log
from hodge_gue.genus_zero import solve_w
from hodge_gue.jets import (
    JetError,
    JetFunction,
    builtin_F,
    builtin_H,
    cosh_apply,
    cosh_weight,
    d0,
    jet_substitute,
)
from hodge_gue.algebra import GenusSeries

PROPS = settings(max_examples=100, deadline=None)
V = JetFunction.var


def test_text_round_trip_and_parse():
    f = JetFunction.from_text("1/2 v1^-2*v3\n-1/3 v\n1/24 log(v1)\n")
    assert f.coefficient("v1^-2*v3") == Q(1, 2)
    assert f.coefficient("log(v1)") == Q(1, 24)
    assert JetFunction.from_text(f.to_text()) == f


def test_negative_exponent_only_on_v1():
    with pytest.raises(JetError):
        V(2, -1)


def test_d0_on_generators():
    assert d0(V(0)) == V(1)
    assert d0(V(3)) == V(4)
    assert d0(JetFunction.log_v1()) == V(2) * V(1, -1)


def test_d0_squared_H1():
    expected = JetFunction.from_text("-1/16 v2\n1/24 v1^-1*v3\n-1/24 v1^-2*v2^2\n")
    assert d0(d0(builtin_H(1))) == expected


@pytest.mark.parametrize("g,mono,value", [
    (2, "v1^-4*v2^3", Q(1, 90)),
    (3, "v4", Q(13, 120960)),
    (4, "v1^-4*v10", Q(1, 497664)),
    (5, "v1^-5*v13", Q(1, 29859840)),
])
def test_builtin_F_golden(g, mono, value):
    assert builtin_F(g).coefficient(mono) == value


def test_builtin_H2():
    H2 = builtin_H(2)
    assert len(H2) == 7
    assert H2.coefficient("v1^-4*v2^3") == Q(1, 360)
    assert H2.coefficient("v1^-2*v4") == Q(1, 1152)


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_builtin_F_structure(g):
    F = builtin_F(g)
    assert not F.depends_on_v() and F.logcoef == 0
    assert F.max_index() == 3 * g - 2
    # homogeneity: sum k e_k = 2g - 2
    assert F.x_weights() == {2 * g - 2}


def test_builtin_out_of_range():
    with pytest.raises(JetError):
        builtin_F(6)
    with pytest.raises(JetError):
        builtin_H(3)


def test_log_times_nonconstant_rejected():
    with pytest.raises(JetError):
        JetFunction.log_v1() * V(2)


@st.composite
def jets(draw, with_v=True):
    rat = {}
    for _ in range(draw(st.integers(0, 4))):
        mono = []
        for i in draw(st.lists(st.integers(0 if with_v else 1, 4), max_size=3, unique=True)):
            lo = -2 if i == 1 else 1
            mono.append((i, draw(st.integers(lo, 3).filter(lambda e: e != 0))))
        rat[tuple(sorted(mono))] = Q(draw(st.integers(-5, 5)), draw(st.integers(1, 5)))
    return JetFunction(rat)


@PROPS
@given(jets(), jets(), jets())
def test_jet_ring_and_derivation_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert d0(a * b) == d0(a) * b + a * d0(b)
    assert d0(a + b) == d0(a) + d0(b)


_U = series_log(solve_w(2, 3))
# substituting v twice would produce log(x)^2, which is outside the coefficient ring
substitutable = jets(with_v=False)


@PROPS
@given(substitutable)
def test_substitution_commutes_with_d0(f):
    f = f + JetFunction.log_v1(Q(1, 7))
    assert jet_substitute(d0(f), _U) == jet_substitute(f, _U).derivative_x()


@PROPS
@given(substitutable, substitutable)
def test_substitution_is_multiplicative(a, b):
    assert jet_substitute(a * b, _U) == jet_substitute(a, _U) * jet_substitute(b, _U)


def test_substitute_log_x():
    logx = Series.constant(("s",), 0, LaurentLog.log_x())
    value = jet_substitute(builtin_F(2), logx)
    assert value.coefficient((0,)) == LaurentLog.x_power(-2, Q(-1, 240))


def test_cosh_apply_weights():
    assert cosh_weight(1) == Q(1, 8)
    x = Series.constant(("s",), 1, LaurentLog.x_power(4))
    out = cosh_apply(GenusSeries({0: x, 2: x.zero()}))
    assert out[1].coefficient((0,)) == LaurentLog.x_power(2, Q(12, 8))
    assert out[2].coefficient((0,)) == LaurentLog.x_power(0, Q(24, 384))
