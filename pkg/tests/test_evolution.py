import warnings
from collections import Counter

import numpy as np
import pytest
import sympy
from scipy.linalg import expm

from brownian_replica import closed_form
from brownian_replica.errors import DomainError
from brownian_replica.evolution import (
    SpectrumE,
    assemble_U,
    generator_matrix,
    series_check,
    solution,
    solve_f,
    spectrum_MJ,
    spectrum_residuals,
    taylor_bound,
)
from brownian_replica.oracle import build_dense, full_pairing_vector

from conftest import D_SYM, expr


def _wg3(D):
    base = (D**2 - 1) * (D**2 - 4)
    return np.array([(D**2 - 2) / (D * base), -1 / base, 2 / (D * base)])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_initial_condition(n):
    f = solve_f(n, 5, 1.0, 0.0)
    e1 = np.zeros(len(f))
    e1[0] = 1
    assert np.allclose(f, e1, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("D", [5, 7.5, 10])
@pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
def test_solvers_agree(n, D, t):
    ref = solve_f(n, D, 1.0, t, method="expm")
    assert np.max(np.abs(solve_f(n, D, 1.0, t) - ref)) < 1e-12
    assert np.max(np.abs(solve_f(n, D, 1.0, t, method="closed") - ref)) < 1e-12


def test_n2_coefficients_equal_reference(reference):
    for D in (3, 5, 11):
        want = np.array([[float(expr(c).subs(D_SYM, D)) for c in row] for row in reference["n2_fa_coefficients"]])
        assert np.max(np.abs(closed_form.coefficient_matrix(2, D) - want)) < 1e-14


def test_n2_reference_exponents_do_not_solve_generator(reference):
    # the reference rates 1/(2 -+ 2D) disagree with the generator; 2 -+ 2/D agree
    D, t = 5, 1.0
    coeffs = closed_form.coefficient_matrix(2, D)
    rates = np.array([float(expr(r).subs(D_SYM, D)) for r in reference["n2_fa_rates_as_published"]])
    ref = solve_f(2, D, 1.0, t, method="expm")
    assert np.max(np.abs(coeffs @ np.exp(-rates * t) - ref)) > 1e-2
    assert np.max(np.abs(coeffs @ np.exp(-closed_form.rates(2, D) * t) - ref)) < 1e-14


def test_closed_form_singular_falls_back():
    with pytest.warns(RuntimeWarning):
        f = solve_f(3, 3, 1.0, 0.5, method="closed")
    assert np.allclose(f, solve_f(3, 3, 1.0, 0.5, method="expm"), atol=1e-13)
    with pytest.raises(DomainError):
        solve_f(5, 3, 1.0, 0.5, method="closed")


@pytest.mark.parametrize("order", [4, 8, 16])
def test_taylor_series(order):
    err = series_check(3, 6, 1.0, 0.3, order)
    assert err <= taylor_bound(3, 6, 1.0, 0.3, order) + 1e-14


def test_zero_noise_is_identity():
    for n in (2, 3):
        f = solve_f(n, 4, 0.0, 3.0)
        assert f[0] == pytest.approx(1.0, abs=1e-15)
        assert np.max(np.abs(f[1:])) < 1e-15


@pytest.mark.parametrize("n", [2, 3])
def test_eigenvalues_nonpositive(n):
    for D in range(2, 51):
        assert np.max(spectrum_MJ(n, D).real) < 1e-10


def test_symbolic_spectrum_n3(reference):
    want = Counter(sympy.factor(expr(v)) for v in reference["n3_spectrum"])
    assert spectrum_MJ(3) == want


def test_plateau_n3():
    D = 5
    f = solve_f(3, D, 1.0, 60.0)
    assert np.max(np.abs(f[:23])) < 1e-12
    assert np.allclose(f[23:], _wg3(D), atol=1e-12)


def test_plateau_only_for_zero_modes():
    D = 6
    sol = solution(3, D)
    zero = np.abs(sol.eigenvalues) < 1e-12
    assert zero.sum() == 3
    late = [sol(t) for t in (40.0, 80.0)]
    assert np.allclose(late[0], late[1], atol=1e-14)
    assert np.max(np.abs(sol(1.0) - late[1])) > 1e-3


@pytest.mark.parametrize("n,D", [(1, 3), (2, 3), (3, 2)])
def test_trace_preservation_and_unitality(n, D):
    L = build_dense(n, D).matrix
    v = full_pairing_vector(n, D)
    assert np.max(np.abs(v @ L)) < 1e-12
    assert np.max(np.abs(L @ v)) < 1e-12
    U = assemble_U(n, D, 1.0, None, 2.0)
    assert np.allclose(v @ U, v, atol=1e-12)


@pytest.mark.parametrize("n,D", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_spectrum_embeds_in_dense(n, D):
    res = spectrum_residuals(n, D)
    assert max(r for _, _, r, _ in res) < 1e-10
    realized = {round(lam.real, 9) for lam, _, _, alive in res if alive}
    dense = np.linalg.eigvals(build_dense(n, D).matrix)
    for lam in realized:
        assert np.min(np.abs(dense - lam)) < 1e-8
    if D >= 2 * n:
        assert all(alive for *_, alive in res)


def test_small_D_drops_eigenvalues():
    missing = sorted(round(lam.real, 6) for lam, _, _, alive in spectrum_residuals(3, 2) if not alive)
    assert missing == [-4.5, -2.0, -1.5]


def test_spectrum_type_checks():
    with pytest.raises(DomainError):
        SpectrumE([0.0, np.inf])
    with pytest.raises(DomainError):
        assemble_U(2, 3, 1.0, [0.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        solve_f(2, 3, 1.0, -1.0)


def test_phase_matches_total():
    E = SpectrumE([0.0, 1.0])
    assert np.allclose(E.total(1), [0, -1, 1, 0])
    assert np.allclose(E.phase(1, 0.5), np.exp(-0.5j * np.array([0, -1, 1, 0])))


def test_generator_is_cached():
    assert generator_matrix(3) is generator_matrix(3)
    mj = generator_matrix(2).mj_numeric(5.0, 1.0)
    assert np.allclose(expm(mj)[:, 0], solve_f(2, 5, 1.0, 1.0), atol=1e-13)


def test_vectors_differ_only_in_p3_constants(reference):
    D = 7
    xi = closed_form.basis_functions(3, D, 1.0, 0.6)
    f = solve_f(3, D, 1.0, 0.6)
    for a, vec in reference["n3_vectors"].items():
        v = np.array([float(expr(c).subs(D_SYM, D)) for c in vec])
        a = int(a)
        if a >= 24:
            assert np.isclose(abs(v @ xi - f[a - 1]), 2 * abs(_wg3(D)[a - 24]), atol=1e-13)
            assert np.isclose(v[-1], -_wg3(D)[a - 24], atol=1e-15)
            v[-1] = -v[-1]
        assert abs(v @ xi - f[a - 1]) < 1e-13
