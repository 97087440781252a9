"""Closed-form pattern coefficients for two and three replicas.

Each coefficient is ``f_a(t) = sum_k c_{a,k}(D) exp(-r_k(D) J t)``: a fixed set
of decay rates ``r_k`` and rational functions ``c_{a,k}`` of ``D``.  The tables
are stored as arithmetic expressions in ``D`` and compiled once.  They follow
the standard category order of :func:`brownian_replica.category.standard_basis`.

The rational functions have poles at small ``D`` (``D - 4`` appears for three
replicas), where :func:`closed_form_f` refuses and callers should fall back to
a matrix exponential.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

_RATES = {
    2: ("0", "1", "2 - 2/D", "2", "2 + 2/D"),
    3: (
        "1",
        "2",
        "2*(D + 1)/D",
        "2*(D - 1)/D",
        "3",
        "3*(D + 1)/D",
        "3*(D - 1)/D",
        "3*(D + 2)/D",
        "3*(D - 2)/D",
        "0",
    ),
}

_COEFFS = {
    2: (
        ("0", "0", "1/4", "1/2", "1/4"),
        ("0", "(D**2 - 2)/(D*(D**2 - 4))", "-1/(4*(D - 2))", "-1/(2*D)", "-1/(4*(D + 2))"),
        ("0", "0", "-1/4", "0", "1/4"),
        ("0", "-1/(D**2 - 4)", "1/(4*(D - 2))", "0", "-1/(4*(D + 2))"),
        ("1/(D**2 - 1)", "-2/(D**2 - 4)", "1/(2*(D - 1)*(D - 2))", "0", "1/(2*(D + 1)*(D + 2))"),
        ("0", "0", "1/4", "-1/2", "1/4"),
        ("-1/(D**3 - D)", "4/(D*(D**2 - 4))", "-1/(2*(D - 1)*(D - 2))", "0", "1/(2*(D + 1)*(D + 2))"),
        ("0", "2/(D*(D**2 - 4))", "-1/(4*(D - 2))", "1/(2*D)", "-1/(4*(D + 2))"),
    ),
    # the last entry of the three fully paired rows is the t -> infinity plateau,
    # which equals the S_3 Weingarten function
    3: (
    (
        "0",
        "0",
        "0",
        "0",
        "1/2",
        "2/9",
        "2/9",
        "1/36",
        "1/36",
        "0",
    ),
    (
        "0",
        "0",
        "0",
        "0",
        "0",
        "1/9",
        "-1/9",
        "1/36",
        "-1/36",
        "0",
    ),
    (
        "0",
        "0",
        "0",
        "0",
        "-1/18",
        "0",
        "0",
        "1/36",
        "1/36",
        "0",
    ),
    (
        "0",
        "0",
        "0",
        "0",
        "-1/6",
        "1/18",
        "1/18",
        "1/36",
        "1/36",
        "0",
    ),
    (
        "0",
        "0",
        "0",
        "0",
        "0",
        "-1/18",
        "1/18",
        "1/36",
        "-1/36",
        "0",
    ),
    (
        "0",
        "0",
        "0",
        "0",
        "1/6",
        "-1/9",
        "-1/9",
        "1/36",
        "1/36",
        "0",
    ),
    (
        "0",
        "(D**2 - 5)/(2*D*(D - 3)*(D + 3))",
        "(D**2 + 3*D - 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "(D**2 - 3*D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "-(9*D**2 - 20)/(18*D*(D - 2)*(D + 2))",
        "-2*(D + 2)/(9*(D + 1)*(D + 3))",
        "-2*(D - 2)/(9*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "0",
        "(D**2 + 3*D - 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "-(D**2 - 3*D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "-4/(9*(D - 2)*(D + 2))",
        "-1/(9*(D + 1))",
        "1/(9*(D - 1))",
        "-1/(36*(D + 4))",
        "1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "-1/(2*(D - 3)*(D + 3))",
        "-(D + 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "-(D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "2/(9*(D - 2)*(D + 2))",
        "-(2*D + 3)/(18*(D + 1)*(D + 3))",
        "(2*D - 3)/(18*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "-(D**2 - 5)/(2*D*(D - 3)*(D + 3))",
        "(D**2 + 3*D - 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "(D**2 - 3*D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "(D**2 - 20)/(18*D*(D - 2)*(D + 2))",
        "-2/(9*(D + 1)*(D + 3))",
        "2/(9*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "-1/(2*D*(D - 3)*(D + 3))",
        "-(D + 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "(D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "(D**2 + 4)/(18*D*(D - 2)*(D + 2))",
        "-1/(18*(D + 1)*(D + 3))",
        "1/(18*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "1/(D*(D - 3)*(D + 3))",
        "1/(2*(D - 2)*(D + 1)*(D + 4))",
        "1/(2*(D - 4)*(D - 1)*(D + 2))",
        "(D**2 - 8)/(18*D*(D - 2)*(D + 2))",
        "1/(9*(D + 1)*(D + 3))",
        "-1/(9*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "1/(2*D*(D - 3)*(D + 3))",
        "-(D + 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "(D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "(3*D**2 - 4)/(18*D*(D - 2)*(D + 2))",
        "-(D + 2)/(18*(D + 1)*(D + 3))",
        "-(D - 2)/(18*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "1/(2*(D - 3)*(D + 3))",
        "-(D + 2)/(4*(D - 2)*(D + 1)*(D + 4))",
        "-(D - 2)/(4*(D - 4)*(D - 1)*(D + 2))",
        "2/(9*(D - 2)*(D + 2))",
        "D/(18*(D + 1)*(D + 3))",
        "-D/(18*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "0",
        "1/(2*(D - 2)*(D + 1)*(D + 4))",
        "-1/(2*(D - 4)*(D - 1)*(D + 2))",
        "-1/(9*(D - 2)*(D + 2))",
        "1/(18*(D + 1))",
        "-1/(18*(D - 1))",
        "-1/(36*(D + 4))",
        "1/(36*(D - 4))",
        "0",
    ),
    (
        "0",
        "-1/(D*(D - 3)*(D + 3))",
        "1/(2*(D - 2)*(D + 1)*(D + 4))",
        "1/(2*(D - 4)*(D - 1)*(D + 2))",
        "-(3*D**2 - 8)/(18*D*(D - 2)*(D + 2))",
        "(D + 2)/(9*(D + 1)*(D + 3))",
        "(D - 2)/(9*(D - 3)*(D - 1))",
        "-1/(36*(D + 4))",
        "-1/(36*(D - 4))",
        "0",
    ),
    (
        "(D**4 - 8*D**2 + 6)/(D**2*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "-(D**2 - 3)/(D**2*(D - 3)*(D + 3))",
        "-D*(D + 3)/(2*(D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "-D*(D - 3)/(2*(D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "2*(2*D**2 - 3)/(9*D**2*(D - 2)*(D + 2))",
        "2/(9*(D + 1)*(D + 3))",
        "2/(9*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "-1/(D*(D - 3)*(D + 3))",
        "1/(2*D*(D - 3)*(D + 3))",
        "-D/(4*(D - 2)*(D + 1)*(D + 4))",
        "D/(4*(D - 4)*(D - 1)*(D + 2))",
        "2/(9*D*(D - 2)*(D + 2))",
        "1/(18*(D + 1)*(D + 3))",
        "-1/(18*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "-1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "-1/(D*(D - 3)*(D + 3))",
        "2/(D*(D - 3)*(D + 3))",
        "1/((D - 2)*(D + 1)*(D + 4))",
        "1/((D - 4)*(D - 1)*(D + 2))",
        "-4/(9*D*(D - 2)*(D + 2))",
        "2/(9*(D + 1)*(D + 3))",
        "-2/(9*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "-1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "(2*D**2 - 3)/(D**2*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "(D**2 - 3)/(2*D**2*(D - 3)*(D + 3))",
        "-(D**2 + 3*D + 4)/(4*(D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "-(D**2 - 3*D + 4)/(4*(D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "(D**2 + 3)/(9*D**2*(D - 2)*(D + 2))",
        "-1/(9*(D + 1)*(D + 3))",
        "-1/(9*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "(D**2 + 6)/(D**2*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "3/(D**2*(D - 3)*(D + 3))",
        "D/(2*(D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "-D/(2*(D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "(D**2 - 6)/(9*D**2*(D - 2)*(D + 2))",
        "-1/(9*(D + 1)*(D + 3))",
        "-1/(9*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "(2*D**2 - 3)/(D**2*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "-3/(2*D**2*(D - 3)*(D + 3))",
        "(3*D + 4)/(4*(D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "-(3*D - 4)/(4*(D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "-(2*D**2 - 3)/(9*D**2*(D - 2)*(D + 2))",
        "1/(18*(D + 1)*(D + 3))",
        "1/(18*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "-5/(D*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "-1/(D*(D - 3)*(D + 3))",
        "D/(2*(D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "D/(2*(D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "-1/(9*D*(D - 2)*(D + 2))",
        "-1/(9*(D + 1)*(D + 3))",
        "1/(9*(D - 3)*(D - 1))",
        "1/(18*(D + 3)*(D + 4))",
        "-1/(18*(D - 4)*(D - 3))",
        "0",
    ),
    (
        "-3/(D*(D - 3)*(D + 3))",
        "0",
        "3/(2*(D - 2)*(D + 1)*(D + 4))",
        "3/(2*(D - 4)*(D - 1)*(D + 2))",
        "-2/(3*D*(D - 2)*(D + 2))",
        "0",
        "0",
        "-1/(6*(D + 2)*(D + 3)*(D + 4))",
        "-1/(6*(D - 4)*(D - 3)*(D - 2))",
        "(D**2 - 2)/(D*(D - 2)*(D - 1)*(D + 1)*(D + 2))",
    ),
    (
        "5/((D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "0",
        "1/(2*(D + 1)*(D + 2)*(D + 4))",
        "-1/(2*(D - 4)*(D - 2)*(D - 1))",
        "0",
        "0",
        "0",
        "-1/(6*(D + 2)*(D + 3)*(D + 4))",
        "1/(6*(D - 4)*(D - 3)*(D - 2))",
        "-1/((D - 2)*(D - 1)*(D + 1)*(D + 2))",
    ),
    (
        "-15/(D*(D - 3)*(D - 2)*(D + 2)*(D + 3))",
        "0",
        "-3/((D - 2)*(D + 1)*(D + 2)*(D + 4))",
        "3/((D - 4)*(D - 2)*(D - 1)*(D + 2))",
        "1/(3*D*(D - 2)*(D + 2))",
        "0",
        "0",
        "-1/(6*(D + 2)*(D + 3)*(D + 4))",
        "-1/(6*(D - 4)*(D - 3)*(D - 2))",
        "2/(D*(D - 2)*(D - 1)*(D + 1)*(D + 2))",
    ),
    ),
}

SINGULAR_D = {2: frozenset({1, 2}), 3: frozenset({1, 2, 3, 4})}

_COMPILED: dict[int, tuple] = {}


def _compiled(n: int):
    if n not in _COMPILED:
        rates = tuple(compile(r, "<rate>", "eval") for r in _RATES[n])
        coeffs = tuple(tuple(compile(c, "<coeff>", "eval") for c in row) for row in _COEFFS[n])
        _COMPILED[n] = (rates, coeffs)
    return _COMPILED[n]


def available(n: int) -> bool:
    return n in _COEFFS


def rates(n: int, D: float) -> np.ndarray:
    """Decay rates ``r_k(D)`` (in units of ``J``)."""
    _check(n, D)
    env = {"D": float(D)}
    return np.array([eval(r, {}, env) for r in _compiled(n)[0]], dtype=float)


def coefficient_matrix(n: int, D: float) -> np.ndarray:
    """``c_{a,k}(D)`` as a ``(categories, rates)`` array."""
    _check(n, D)
    env = {"D": float(D)}
    return np.array([[eval(c, {}, env) for c in row] for row in _compiled(n)[1]], dtype=float)


def _check(n: int, D: float) -> None:
    if n not in _COEFFS:
        raise DomainError(f"no closed form stored for n={n}")
    if float(D) in SINGULAR_D[n] or D <= 0:
        raise DomainError(f"closed form for n={n} is singular at D={D}")


def basis_functions(n: int, D: float, J: float, t: float) -> np.ndarray:
    """The exponentials ``exp(-r_k J t)``."""
    return np.exp(-rates(n, D) * J * t)


def closed_form_f(n: int, D: float, J: float, t: float) -> np.ndarray:
    """``f_a(t)`` from the stored tables."""
    return coefficient_matrix(n, D) @ basis_functions(n, D, J, t)
