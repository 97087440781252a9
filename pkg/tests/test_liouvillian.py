import numpy as np
import pytest
import sympy

from brownian_replica.category import standard_basis
from brownian_replica.errors import DomainError
from brownian_replica.evolution import SpectrumE, category_dense
from brownian_replica.graph import Graph, enumerate_graphs, to_dense
from brownian_replica.liouvillian import act_L, act_L_by_parts, act_P, build_M, combo_dense
from brownian_replica.oracle import P_op, X_op, build_dense

from conftest import D_SYM, J_SYM, expr


@pytest.mark.parametrize("n", [1, 2, 3])
def test_master_formula_equals_term_by_term_action(n):
    for g in enumerate_graphs(n):
        assert act_L(g) == act_L_by_parts(g)


@pytest.mark.parametrize("n,D", [(1, 3), (2, 3), (2, 4)])
def test_graph_action_matches_dense(n, D):
    # J = D keeps every dense entry an integer, so the comparison is exact
    J = float(D)
    L = build_dense(n, D, J=J).matrix.real
    for g in enumerate_graphs(n):
        assert np.array_equal(L @ to_dense(g, D), combo_dense(act_L(g), D, w=-n * J, J=J).real)


@pytest.mark.parametrize("n,D", [(1, 3), (1, 4), (2, 3), (2, 4)])
def test_category_action_matches_dense(n, D):
    J = float(D)
    L = build_dense(n, D, J=J).matrix.real
    mj = build_M(n).mj_numeric(D, J)
    F = category_dense(n, D)
    for a in range(len(F)):
        rhs = sum(mj[b, a] * F[b] for b in range(len(F)))
        assert np.array_equal(L @ F[a], rhs)


def test_n2_matrix_equals_reference(reference):
    M = build_M(2).to_sympy()
    want = sympy.Matrix([[expr(c) for c in row] for row in reference["n2_M"]])
    assert (M - want).applyfunc(sympy.simplify) == sympy.zeros(8, 8)
    assert build_M(2).basis.names() == [
        "F_{0,I}", "F_{1,I}", "F_{0,X+Xb}", "F_{1,X+Xb}", "F_{2,I}", "F_{0,XXb}", "F_{2,X+Xb}", "F_{1,XXb}",
    ]


def test_n3_mj_equals_reference(reference):
    mat = build_M(3)
    rows = reference["n3_MJ"]["rows"]
    for b in range(26):
        for a in range(26):
            c = mat.mj_entries()[b][a]
            assert [c.coefficient(0, 1, 0), c.coefficient(0, 1, -1)] == rows[b][a], (b, a)
            assert sympy.expand(c.to_sympy() - rows[b][a][0] * J_SYM - rows[b][a][1] * J_SYM / D_SYM) == 0


def test_column_convention():
    mat = build_M(2)
    # L F_{0,X+Xb} has -2J/D F_{0,I}: column 3, row 1
    assert str(mat.entry(0, 2)) == "-2*J/D"
    assert str(mat.entry(1, 0)) == "J/D"


def test_spectral_factor_commutes(rng):
    n, D = 2, 3
    E = SpectrumE(rng.standard_normal(D))
    diag = np.diag(E.total(n))
    ops = [P_op(i, j, n, D) for i in range(n) for j in range(n)]
    ops += [X_op(0, 1, n, D), X_op(0, 1, n, D, barred=True)]
    for T in ops:
        assert np.allclose(diag @ T, T @ diag, atol=1e-13)


def test_label_validation():
    with pytest.raises(DomainError):
        act_P(0, 2, Graph.identity(2))
