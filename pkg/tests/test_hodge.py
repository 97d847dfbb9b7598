import pytest

from hodge_gue.algebra import Q
from hodge_gue.correspondence import hodge_free_energies
from hodge_gue.hodge import (
    HodgeTable,
    Partition,
    TableError,
    c2_evaluate,
    partitions,
    q_jet_expansion,
    q_matrix,
    q_matrix_bruteforce,
    stable_hodge_table,
    taylor_hodge_table,
)
from hodge_gue.jets import JetError, builtin_F, builtin_H

P = Partition.of


def test_partition_basics():
    p = P(1, 3, 1)
    assert p.parts == (3, 1, 1)
    assert p.length == 3 and p.weight == 5
    assert p.multiplicities == {3: 1, 1: 2}
    assert p.m_factorial == 2
    assert p.plus_one() == P(4, 2, 2)
    assert P().length == 0 and P().m_factorial == 1
    with pytest.raises(ValueError):
        P(0)


def test_partition_counts():
    assert [len(partitions(n)) for n in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]
    assert partitions(3) == [P(3), P(2, 1), P(1, 1, 1)]


def test_q_matrix_pinned():
    assert q_matrix(P(1), P(1)) == 1
    assert q_matrix(P(2), P(2)) == 1
    assert q_matrix(P(2), P(1, 1)) == -3
    assert q_matrix(P(), P()) == 1


def test_q_matrix_weight_mismatch():
    assert q_matrix(P(2), P(1)) == 0
    assert q_matrix_bruteforce(P(3), P(1, 1)) == 0


def test_q_matrix_no_tuple():
    # (2, 2) cannot be split into blocks of sizes 3 and 1
    assert q_matrix(P(3, 1), P(2, 2)) == 0


def test_q_matrix_bruteforce():
    for n in range(7):
        for rho in partitions(n):
            for mu in partitions(n):
                assert q_matrix(rho, mu) == q_matrix_bruteforce(rho, mu), (rho, mu)


def test_q_matrix_triangular():
    # mu must refine rho, so the matrix is triangular in refinement order
    assert q_matrix(P(1, 1), P(2)) == 0
    for n in range(1, 6):
        for rho in partitions(n):
            assert q_matrix(rho, rho) == 1


def test_genus_one_taylor_coefficients():
    t = taylor_hodge_table(1, builtin_H(1), 2)
    assert t.get(1, 1, (0,)) == Q(-1, 16)
    assert t.get(1, 0, (1,)) == Q(1, 24)
    # string and dilaton equations
    assert t.get(1, 0, (2, 0)) == Q(1, 24)
    assert t.get(1, 0, (1, 1)) == Q(1, 24)


def test_genus_two_table_agrees_between_paths():
    slow = taylor_hodge_table(2, builtin_H(2), 2)
    fast = stable_hodge_table(2, builtin_H(2))
    assert fast.get(2, 0, (4,)) == Q(1, 1152)
    assert fast.get(2, 2, (2,)) == Q(7, 2560)
    shared = 0
    for (g, k, nu), value in fast.items():
        if len(nu) <= 2:
            assert slow.get(g, k, nu) == value
            shared += 1
    assert shared == 6
    # dilaton: <tau_1 X> = (2g - 2 + n) <X>
    assert slow.get(2, 3, (1,)) == 2 * slow.get(2, 3, ())


def test_off_constraint_entries_are_zero():
    t = stable_hodge_table(2, builtin_H(2))
    assert t.get(2, 1, (4,)) == 0


def test_table_rejects_violations():
    with pytest.raises(TableError):
        HodgeTable({(2, 1, (4,)): Q(1)})
    with pytest.raises(TableError):
        HodgeTable.loads('{"genus": 2, "k": 0, "nu": [3], "value": "1/2"}\n')


def test_table_file_round_trip(tmp_path):
    t = stable_hodge_table(3, hodge_free_energies(3)[3])
    path = tmp_path / "g3.jsonl"
    t.save(path)
    assert HodgeTable.load(path) == t
    assert t.get(3, 0, (7,)) == Q(1, 82944)


def test_q_jet_expansion_genus_two():
    assert q_jet_expansion(2, stable_hodge_table(2, builtin_H(2))) == builtin_H(2)


def test_q_jet_expansion_missing_entries():
    table = stable_hodge_table(2, builtin_H(2))
    partial = HodgeTable({key: value for key, value in table.items() if key[2] != (4,)})
    with pytest.raises(TableError, match="missing"):
        q_jet_expansion(2, partial)


@pytest.mark.parametrize("m", [3, 4])
def test_q_jet_expansion_cross_path(m):
    H = hodge_free_energies(m)
    assert q_jet_expansion(m, stable_hodge_table(m, H[m])) == H[m]


def test_c2_evaluate_genus_two_and_three():
    H = hodge_free_energies(3)
    tables = {m: stable_hodge_table(m, H[m]) for m in (2, 3)}
    assert c2_evaluate(2, tables) == builtin_F(2)
    assert c2_evaluate(3, tables) == builtin_F(3)


def test_c2_evaluate_reports_mismatch():
    table = stable_hodge_table(2, builtin_H(2))
    bad = HodgeTable({key: value * (2 if key[2] == (4,) else 1) for key, value in table.items()})
    with pytest.raises(JetError, match="mismatch"):
        c2_evaluate(2, {2: bad})
