"""One check per acceptance criterion, all at zero tolerance."""
from hodge_gue.algebra import Q
from hodge_gue.correspondence import (
    bernoulli_constant_check,
    conjecture_rhs_jet,
    full_conjecture_check,
    genus_one_difference,
    hodge_free_energies,
)
from hodge_gue.genus_zero import (
    F0_closed,
    F0_via_omega,
    genus0_identity_residual,
    omega_at_v0,
    omega_even,
    omega_generating,
)
from hodge_gue.hodge import (
    Partition,
    c2_evaluate,
    partitions,
    q_jet_expansion,
    q_matrix,
    q_matrix_bruteforce,
    stable_hodge_table,
    taylor_hodge_table,
)
from hodge_gue.jets import JetFunction, builtin_F, builtin_H, d0, d0_power
from hodge_gue.ribbon import (
    ValencyProfile,
    a_coefficient,
    compare_all,
    compare_profile,
    enumerate_matchings,
    extract_a_from_F,
    one_vertex_counts,
)

import test_algebra
import test_genus_zero
import test_jets
import test_ribbon


def test_criterion_01_genus_zero_identity(criterion):
    criterion(1, "genus-0 identity residual vanishes at K=4, D=6",
              genus0_identity_residual(4, 6).is_zero())


def test_criterion_02_theta_omega(criterion):
    gen = omega_generating(2, 2, 6)
    closed = all(omega_at_v0(gen[(p, q)]) == omega_even(p, q) for p in range(7) for q in range(7))
    criterion(2, "F0 via two-point functions equals closed F0 (K=2, D=5); closed forms for p, q <= 6",
              closed and F0_via_omega(2, 5) == F0_closed(2, 5))


def test_criterion_03_jet_identities(criterion):
    H1 = builtin_H(1)
    d2 = JetFunction.from_text("-1/16 v2\n1/24 v1^-1*v3\n-1/24 v1^-2*v2^2\n")
    genus2 = (JetFunction.var(2).scale(Q(1, 16 * 24)) + d0_power(H1, 2).scale(Q(1, 4))
              + builtin_H(2).scale(4))
    ok = (d0(genus_one_difference()).is_zero()
          and d0_power(H1, 2) == d2
          and genus2 == builtin_F(2)
          and conjecture_rhs_jet(2, {1: H1, 2: builtin_H(2)}) == builtin_F(2))
    criterion(3, "genus-1 relation up to a constant, genus-2 relation exact", ok)


def test_criterion_04_structure(criterion):
    H = hodge_free_energies(5)
    ok = True
    for g in (3, 4, 5):
        Hg = H[g]
        ok &= not Hg.depends_on_v() and Hg.logcoef == 0 and Hg.is_quasi_polynomial()
        ok &= min(i for m in Hg.monomials() for i, _ in m if i != 1) >= 2
        ok &= Hg.max_index() <= 3 * g - 2
        ok &= conjecture_rhs_jet(g, H) == builtin_F(g)
    criterion(4, "derived H3, H4, H5 are v-free, log-free and round-trip to F3, F4, F5", ok)


def test_criterion_05_bernoulli(criterion):
    values = [bernoulli_constant_check(g) for g in range(2, 6)]
    criterion(5, "u = log x gives B_2g/(4g(g-1)) x^(2-2g) for g = 2..5",
              values == [Q(-1, 240), Q(1, 1008), Q(-1, 1440), Q(1, 1056)])


def test_criterion_06_oracle(criterion):
    rows = compare_all(12)
    pins = {
        (0, (1,)): 1, (0, (1, 1)): 1, (0, (2,)): 2, (1, (2,)): 1, (0, (3,)): 5, (1, (3,)): 10,
    }
    ok = all(r["equal"] for r in rows)
    for (g, profile), value in pins.items():
        ok &= a_coefficient(enumerate_matchings(profile)).get(g) == value
        ok &= extract_a_from_F(g, profile) == value
    eight = compare_profile(ValencyProfile((8,)), 4, census=enumerate_matchings((8,)))[4]
    ten = compare_profile(ValencyProfile((10,)), 5, counts=one_vertex_counts(10))[5]
    six = compare_profile(ValencyProfile((6,)), 3)[3]
    ok &= eight["equal"] and ten["equal"] and six["equal"]
    criterion(6, f"series a_g equals matching census on {len(rows)} profile/genus pairs "
                 "up to 12 half-edges; profiles (6), (8) brute force and (10) fast path", ok)


def test_criterion_07_q_matrix(criterion):
    P = Partition.of
    ok = all(q_matrix(r, m) == q_matrix_bruteforce(r, m)
             for n in range(7) for r in partitions(n) for m in partitions(n))
    ok &= (q_matrix(P(1), P(1)), q_matrix(P(2), P(2)), q_matrix(P(2), P(1, 1))) == (1, 1, -3)
    criterion(7, "Q-matrix equals brute force for weights <= 6; pinned values", ok)


def test_criterion_08_conjecture_machinery(criterion):
    H = hodge_free_energies(5)
    t2 = stable_hodge_table(2, builtin_H(2))
    general = taylor_hodge_table(2, builtin_H(2), 3)
    ok = all(general.get(g, k, nu) == v for (g, k, nu), v in t2.items())
    ok &= q_jet_expansion(2, t2) == builtin_H(2)
    tables = {2: t2}
    for m in (3, 4, 5):
        tables[m] = stable_hodge_table(m, H[m])
        ok &= q_jet_expansion(m, tables[m]) == H[m]
    for g in (2, 3, 4, 5):
        ok &= c2_evaluate(g, tables, check=False) == builtin_F(g)
    criterion(8, "Q-matrix expansion reproduces H2 and F2; cross-path for m = 3..5", ok)


def test_criterion_09_full_series(criterion):
    independent = full_conjecture_check(2, 4, 6)
    internal = full_conjecture_check(5, 4, 6)
    ok = independent.ok and internal.ok and not internal.failures()
    criterion(9, f"series identity per genus and monomial: G=2 independent ({len(independent.rows)} "
                 f"monomials), G=5 internal consistency ({len(internal.rows)} monomials), K=4, D=6", ok)


def test_criterion_10_properties(criterion):
    suites = [
        test_algebra.test_laurent_ring_laws,
        test_algebra.test_laurent_leibniz,
        test_algebra.test_series_ring_laws,
        test_algebra.test_series_derivations,
        test_algebra.test_exp_log_round_trip,
        test_algebra.test_log_is_additive,
        test_jets.test_jet_ring_and_derivation_laws,
        test_jets.test_substitution_commutes_with_d0,
        test_genus_zero.test_riemann_hopf_t_form,
        test_genus_zero.test_riemann_hopf_w_form,
        test_ribbon.test_euler_parity,
        test_ribbon.test_double_factorial_total,
    ]
    for suite in suites:
        suite()
    criterion(10, f"{len(suites)} randomized property suites, 100 instances each", True)
