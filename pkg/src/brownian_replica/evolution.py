"""Pattern coefficients ``f_a(t)`` and the assembled averaged evolution.

The averaged channel is ``U_n(t) = exp(-i E t) sum_a f_a(t) F_a`` where
``f(t) = exp(M_J t) e_1`` and ``e_1`` selects ``F_{0,I} = c[I]``.  The spectral
phase is diagonal on packed indices and commutes with every graph, so it is
kept as a separate left factor.
"""
from __future__ import annotations

import functools
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import closed_form
from .errors import DomainError
from .graph import DEFAULT_MAX_ROWS, check_budget, sum_dense
from .liouvillian import GeneratorMatrix, build_M

EIG_COND_LIMIT = 1e6


@functools.lru_cache(maxsize=None)
def generator_matrix(n: int) -> GeneratorMatrix:
    """Cached compact generator in the standard basis."""
    return build_M(n)


@dataclass(frozen=True)
class SpectrumE:
    """Intrinsic energies ``E_1..E_D`` (units of ``J``)."""

    E: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.E, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise DomainError("energies must be finite")
        object.__setattr__(self, "E", arr)

    @classmethod
    def zero(cls, D: int) -> "SpectrumE":
        return cls(np.zeros(D))

    @property
    def D(self) -> int:
        return len(self.E)

    def is_zero(self) -> bool:
        return not np.any(self.E)

    def total(self, n: int) -> np.ndarray:
        """``sum_k (E_{I_k} - E_{J_k})`` for every packed row index."""
        out = np.zeros(1)
        for _ in range(n):
            out = np.add.outer(out, self.E).reshape(-1)
            out = np.add.outer(out, -self.E).reshape(-1)
        return out

    def phase(self, n: int, t: float) -> np.ndarray:
        """Diagonal of ``exp(-i E t)`` on packed indices."""
        return np.exp(-1j * t * self.total(n))


def _as_spectrum(E, D: int) -> SpectrumE:
    if E is None:
        return SpectrumE.zero(D)
    spec = E if isinstance(E, SpectrumE) else SpectrumE(E)
    if spec.D != D:
        raise DomainError(f"spectrum has {spec.D} energies, expected D={D}")
    return spec


def spectrum_MJ(n: int, D=None, J: float = 1.0):
    """Eigenvalues of ``M_J``.

    With numeric ``D`` returns a sorted complex array.  With ``D=None`` returns
    a ``Counter`` of exact sympy expressions in ``D`` and ``J``.  ``L`` never
    removes pairs, so ``M_J`` is block triangular in the pair count and the
    symbolic spectrum is the union of the diagonal-block spectra.
    """
    mat = generator_matrix(n)
    if D is not None:
        vals = np.linalg.eigvals(mat.mj_numeric(float(D), J))
        return vals[np.lexsort((vals.imag, vals.real))]
    import sympy

    full = mat.to_sympy(mj=True)
    ps = [c.p for c in mat.basis.categories]
    out: Counter = Counter()
    for p in sorted(set(ps)):
        idx = [k for k, q in enumerate(ps) if q == p]
        block = full.extract(idx, idx)
        for val, mult in block.eigenvals().items():
            out[sympy.factor(sympy.simplify(val))] += mult
    return out


@dataclass(frozen=True)
class EvolutionSolution:
    """Eigen-solution of ``f' = M_J f`` at fixed ``D`` and ``J``.

    Call with ``t`` to obtain ``f(t)``.  When the eigenvectors are too
    ill-conditioned the solution evaluates ``expm`` instead.
    """

    n: int
    D: float
    J: float
    eigenvalues: np.ndarray
    names: tuple[str, ...]
    mj: np.ndarray = field(repr=False)
    _vecs: np.ndarray | None = field(repr=False, default=None)
    _weights: np.ndarray | None = field(repr=False, default=None)

    @property
    def uses_eig(self) -> bool:
        return self._vecs is not None

    def __call__(self, t: float) -> np.ndarray:
        if t < 0:
            raise DomainError("evolution time must be non-negative")
        if t == 0:
            return np.eye(len(self.mj))[:, 0]
        if self._vecs is None:
            return expm(self.mj * t)[:, 0]
        # M_J and e_1 are real, so f is real; complex pairs cancel
        return (self._vecs @ (np.exp(self.eigenvalues * t) * self._weights)).real


def solution(n: int, D: float, J: float = 1.0) -> EvolutionSolution:
    mat = generator_matrix(n)
    mj = mat.mj_numeric(float(D), J)
    vals, vecs = np.linalg.eig(mj)
    names = tuple(mat.basis.names())
    if np.linalg.cond(vecs) > EIG_COND_LIMIT:
        return EvolutionSolution(n, float(D), J, vals, names, mj)
    e1 = np.zeros(len(mj))
    e1[0] = 1.0
    weights = np.linalg.solve(vecs, e1)
    return EvolutionSolution(n, float(D), J, vals, names, mj, vecs, weights)


def solve_f(n: int, D: float, J: float, t: float, method: str = "eig") -> np.ndarray:
    """``f(t) = exp(M_J t) e_1``.

    ``method`` is ``"eig"`` (eigendecomposition, falls back to ``expm`` when
    the eigenvectors are ill-conditioned), ``"expm"`` or ``"closed"`` (stored
    closed forms for ``n <= 3``; falls back to ``expm`` with a warning at
    ``D`` values where they are singular).
    """
    if t < 0:
        raise DomainError("evolution time must be non-negative")
    if method == "eig":
        return solution(n, D, J)(t)
    if method == "expm":
        return expm(generator_matrix(n).mj_numeric(float(D), J) * t)[:, 0]
    if method == "closed":
        if not closed_form.available(n):
            raise DomainError(f"no closed form for n={n}")
        if D in closed_form.SINGULAR_D[n]:
            warnings.warn(f"closed form singular at D={D}; using the matrix exponential", RuntimeWarning)
            return solve_f(n, D, J, t, method="expm")
        return closed_form.closed_form_f(n, D, J, t)
    raise DomainError(f"unknown method {method!r}")


def category_dense(n: int, D: int, max_rows: int = DEFAULT_MAX_ROWS) -> list[np.ndarray]:
    """Dense sum of every category of the standard basis."""
    return [sum_dense(sorted(c.members), D, max_rows) for c in generator_matrix(n).basis.categories]


def assemble_U(n: int, D: int, J: float, E, t: float, max_rows: int = DEFAULT_MAX_ROWS, f=None) -> np.ndarray:
    """Dense ``exp(-i E t) sum_a f_a(t) F_a`` of size ``D^{2n}``."""
    check_budget(n, D, max_rows)
    spec = _as_spectrum(E, D)
    if f is None:
        f = solve_f(n, D, J, t)
    out = None
    for fa, dense in zip(f, category_dense(n, D, max_rows)):
        out = fa * dense if out is None else out + fa * dense
    out = out.astype(complex)
    if not spec.is_zero():
        out *= spec.phase(n, t)[:, None]
    return out


def series_check(n: int, D: float, J: float, t: float, order: int) -> float:
    """Max deviation between the truncated Taylor series of ``exp(M_J t) e_1`` and :func:`solve_f`."""
    mj = generator_matrix(n).mj_numeric(float(D), J)
    term = np.zeros(len(mj))
    term[0] = 1.0
    total = term.copy()
    for r in range(1, order + 1):
        term = mj @ term * (t / r)
        total = total + term
    return float(np.max(np.abs(total - solve_f(n, D, J, t))))


def taylor_bound(n: int, D: float, J: float, t: float, order: int) -> float:
    """Upper bound on the Taylor remainder: ``(|M_J| t)^{R+1}/(R+1)! e^{|M_J| t}``."""
    norm = np.linalg.norm(generator_matrix(n).mj_numeric(float(D), J), 1) * t
    return norm ** (order + 1) / math.factorial(order + 1) * math.exp(norm)


def spectrum_residuals(n: int, D: int, J: float = 1.0, max_rows: int = DEFAULT_MAX_ROWS, cutoff: float = 1e-8):
    """Check every eigenspace of ``M_J`` against the dense generator.

    For ``M_J v = lambda v`` the dense operator ``X = sum_a v_a F_a`` obeys
    ``L X = lambda X``.  When ``D < 2n`` the category sums are linearly
    dependent and ``X`` may vanish; such eigenvalues need not occur in the
    dense spectrum.  Eigenvalues are taken from the exact spectrum and each
    eigenspace from an SVD null space, which stays accurate for defective
    blocks.  Returns ``(lambda, multiplicity, residual, realized)`` per
    distinct eigenvalue, the residual being ``|L X - lambda X|_max / |X|_max``.
    """
    import sympy

    from .oracle import build_dense

    L = build_dense(n, D, "GUE", J, max_rows=max_rows).matrix
    F = np.array(category_dense(n, D, max_rows))
    mj = generator_matrix(n).mj_numeric(float(D), J)
    Ds, Js = sympy.symbols("D J")
    exact: Counter = Counter()
    for expr, mult in spectrum_MJ(n).items():
        exact[complex(sympy.N(expr.subs({Ds: D, Js: J}), 30))] += mult
    out = []
    for lam, mult in sorted(exact.items(), key=lambda kv: (kv[0].real, kv[0].imag)):
        _, s, vt = np.linalg.svd(mj - lam * np.eye(len(mj)))
        null = vt[s < 1e-9 * max(1.0, s[0])].conj()
        worst, realized = 0.0, False
        for v in null:
            X = np.tensordot(v, F, axes=1)
            size = float(np.max(np.abs(X)))
            if size < cutoff:
                continue
            realized = True
            worst = max(worst, float(np.max(np.abs(L @ X - lam * X))) / size)
        out.append((lam, mult, worst, realized))
    return out
