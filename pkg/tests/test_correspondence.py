import json

import pytest

from hodge_gue.algebra import Q, series_log
from hodge_gue.correspondence import (
    bernoulli,
    bernoulli_constant_check,
    conjecture_rhs_jet,
    derive_H,
    full_conjecture_check,
    genus_one_difference,
    gue_side,
    hodge_free_energies,
    hodge_side,
)
from hodge_gue.genus_zero import solve_w
from hodge_gue.jets import JetError, JetFunction, builtin_F, builtin_H, d0, jet_substitute


def test_genus_one_relation_up_to_constant():
    assert d0(genus_one_difference()).is_zero()


def test_genus_two_relation_exact():
    assert conjecture_rhs_jet(2, {1: builtin_H(1), 2: builtin_H(2)}) == builtin_F(2)


def test_derived_H2_is_builtin():
    assert derive_H(2, builtin_F(2), {1: builtin_H(1)}) == builtin_H(2)


@pytest.mark.parametrize("g", [3, 4, 5])
def test_derived_H_structure(g):
    H = hodge_free_energies(5)
    Hg = H[g]
    assert not Hg.depends_on_v()
    assert Hg.logcoef == 0
    assert Hg.max_index() == 3 * g - 2
    assert Hg.x_weights() == {2 * g - 2}
    assert Hg.is_quasi_polynomial()
    assert conjecture_rhs_jet(g, H) == builtin_F(g)


def test_missing_H_raises():
    with pytest.raises(JetError):
        conjecture_rhs_jet(3, {1: builtin_H(1), 2: builtin_H(2)})


def test_bernoulli_numbers():
    assert [bernoulli(n) for n in range(7)] == [1, Q(-1, 2), Q(1, 6), 0, Q(-1, 30), 0, Q(1, 42)]
    assert bernoulli(10) == Q(5, 66)


@pytest.mark.parametrize("g,value", [(2, Q(-1, 240)), (3, Q(1, 1008)), (4, Q(-1, 1440)), (5, Q(1, 1056))])
def test_bernoulli_constants(g, value):
    assert bernoulli_constant_check(g) == value


def test_series_check_small():
    report = full_conjecture_check(3, 2, 4)
    assert report.ok
    assert report.genus_ok == {0: True, 1: True, 2: True, 3: True}
    rows = [json.loads(line) for line in report.to_json_lines().splitlines()]
    assert {r["genus"] for r in rows} == {0, 1, 2, 3}
    assert all(r["equal"] for r in rows)
    assert any("internal consistency" in n for n in report.notes)


def test_series_check_detects_a_perturbation():
    u = series_log(solve_w(2, 4))
    lhs, rhs = gue_side(2, 2, 4, u=u), hodge_side(2, 2, 4, u=u)
    assert (lhs - rhs).without_constant().is_zero()
    bump = jet_substitute(JetFunction.var(1, -2) * JetFunction.var(4), u).scale(Q(1, 1000))
    assert not (lhs + bump - rhs).without_constant().is_zero()


def test_parallel_report_is_identical():
    a = full_conjecture_check(2, 2, 3, workers=1)
    b = full_conjecture_check(2, 2, 3, workers=2)
    assert a.to_json_lines() == b.to_json_lines()


def test_genus_range_checked():
    with pytest.raises(ValueError):
        full_conjecture_check(6, 2, 3)
