"""Dense ground truth: the replica generator as a ``D^{2n} x D^{2n}`` matrix.

Slots follow the packing of :func:`brownian_replica.graph.to_dense`: slot
``2k`` is the unbarred index ``I_k``, slot ``2k + 1`` the barred index ``J_k``,
and ``I_1`` is the most significant digit.  Every two-slot operator is built
locally (``D^2 x D^2``) and embedded by a tensor transpose, independently of
the graph code.

Three ensembles are provided (``P`` is the unnormalized pairing
``sum_{xy} |xx><yy|``, ``X`` the swap):

* GUE: ``w + (J/D) sum P_{i jbar} - (J/D) sum_{i<j} (X_{ij} + X_{ibar jbar})``
* GOE: ``-nJ + J/(D+1) [sum (P_{i jbar} + X_{i jbar}) - sum_{i<j} (X + P)_{ij} - sum_{i<j} (X + P)_{ibar jbar}]``
* GSE: the GOE form with ``D + 1 -> D - 1`` and the symplectic form ``Omega``
  twisting ``P_{ij}``, ``P_{ibar jbar}`` and ``X_{i jbar}``.

:func:`build_dense_from_covariance` derives the same matrices from the
second moment of the noise, as an independent check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DomainError
from .evolution import SpectrumE, _as_spectrum
from .graph import DEFAULT_MAX_ROWS, check_budget

ENSEMBLES = ("GUE", "GOE", "GSE")


def symplectic_form(D: int) -> np.ndarray:
    if D % 2:
        raise DomainError("the symplectic ensemble needs even D")
    return np.kron(np.eye(D // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def swap_local(D: int) -> np.ndarray:
    """``|x y> -> |y x>`` on two slots."""
    out = np.zeros((D * D, D * D))
    for x in range(D):
        for y in range(D):
            out[y * D + x, x * D + y] = 1.0
    return out


def pairing_local(D: int, form: np.ndarray | None = None) -> np.ndarray:
    """``|phi><phi|`` with ``phi = sum_xy form[x, y] |x y>`` (identity by default)."""
    phi = (np.eye(D) if form is None else form).reshape(-1)
    return np.outer(phi, phi.conj())


def twisted_swap_local(D: int) -> np.ndarray:
    """``(Omega (x) 1) X (Omega^T (x) 1)``."""
    a = np.kron(symplectic_form(D), np.eye(D))
    return a @ swap_local(D) @ a.T


def embed(local: np.ndarray, a: int, b: int, nslots: int, D: int) -> np.ndarray:
    """Place a two-slot operator on slots ``a`` and ``b`` of ``nslots``."""
    if a == b:
        raise DomainError("a two-slot operator needs distinct slots")
    order = [a, b] + [s for s in range(nslots) if s not in (a, b)]
    full = np.kron(local, np.eye(D ** (nslots - 2))).reshape((D,) * (2 * nslots))
    axes = [order.index(s) for s in range(nslots)] + [nslots + order.index(s) for s in range(nslots)]
    return full.transpose(axes).reshape(D**nslots, D**nslots)


def _slot_pairs(n: int, kind: str) -> list[tuple[int, int]]:
    if kind == "uu":
        return [(2 * i, 2 * j) for i in range(n) for j in range(i + 1, n)]
    if kind == "bb":
        return [(2 * i + 1, 2 * j + 1) for i in range(n) for j in range(i + 1, n)]
    return [(2 * i, 2 * j + 1) for i in range(n) for j in range(n)]


def _sum_embedded(local: np.ndarray, n: int, kind: str, D: int) -> np.ndarray:
    size = D ** (2 * n)
    out = np.zeros((size, size), dtype=local.dtype)
    for a, b in _slot_pairs(n, kind):
        out += embed(local, a, b, 2 * n, D)
    return out


def P_op(i: int, j: int, n: int, D: int) -> np.ndarray:
    """Dense ``P_{i jbar}`` (zero-based contour labels)."""
    return embed(pairing_local(D), 2 * i, 2 * j + 1, 2 * n, D)


def X_op(i: int, j: int, n: int, D: int, barred: bool = False) -> np.ndarray:
    """Dense ``X_{ij}`` or ``X_{ibar jbar}``."""
    off = 1 if barred else 0
    return embed(swap_local(D), 2 * i + off, 2 * j + off, 2 * n, D)


@dataclass(frozen=True)
class DenseGenerator:
    n: int
    D: int
    ensemble: str
    J: float
    E: SpectrumE
    matrix: np.ndarray = field(repr=False)


def build_dense(n: int, D: int, ensemble: str = "GUE", J: float = 1.0, E=None, max_rows: int = DEFAULT_MAX_ROWS) -> DenseGenerator:
    """Dense generator for one of the three ensembles."""
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    if ensemble == "GSE" and D % 2:
        raise DomainError("the symplectic ensemble needs even D")
    size = check_budget(n, D, max_rows)
    spec = _as_spectrum(E, D)
    eye = np.eye(size)
    X = swap_local(D)
    P = pairing_local(D)
    if ensemble == "GUE":
        mat = -n * J * eye + (J / D) * (_sum_embedded(P, n, "ub", D) - _sum_embedded(X, n, "uu", D) - _sum_embedded(X, n, "bb", D))
    elif ensemble == "GOE":
        cross = _sum_embedded(P + X, n, "ub", D)
        same = _sum_embedded(P + X, n, "uu", D) + _sum_embedded(P + X, n, "bb", D)
        mat = -n * J * eye + J / (D + 1) * (cross - same)
    else:
        P_om = pairing_local(D, symplectic_form(D))
        cross = _sum_embedded(P + twisted_swap_local(D), n, "ub", D)
        same = _sum_embedded(P_om + X, n, "uu", D) + _sum_embedded(P_om + X, n, "bb", D)
        mat = -n * J * eye + J / (D - 1) * (cross - same)
    mat = mat.astype(complex)
    if not spec.is_zero():
        mat[np.diag_indices(size)] += -1j * spec.total(n)
    return DenseGenerator(n, D, ensemble, J, spec, mat)


def hermitian_basis(D: int, ensemble: str) -> list[np.ndarray]:
    """Frobenius-orthonormal real basis of the ensemble's Hamiltonian space."""
    mats = []
    for i in range(D):
        m = np.zeros((D, D), dtype=complex)
        m[i, i] = 1.0
        mats.append(m)
        for j in range(i + 1, D):
            m = np.zeros((D, D), dtype=complex)
            m[i, j] = m[j, i] = 1 / np.sqrt(2)
            mats.append(m)
            if ensemble != "GOE":
                m = np.zeros((D, D), dtype=complex)
                m[i, j], m[j, i] = 1j / np.sqrt(2), -1j / np.sqrt(2)
                mats.append(m)
    if ensemble == "GSE":
        om = symplectic_form(D)
        proj = [(m + om @ m.T @ om.T) / 2 for m in mats]
        rows = np.array([np.concatenate([p.real.ravel(), p.imag.ravel()]) for p in proj])
        _, s, vt = np.linalg.svd(rows, full_matrices=False)
        rank = int((s > 1e-10).sum())
        mats = [(v[: D * D] + 1j * v[D * D :]).reshape(D, D) for v in vt[:rank]]
    return mats


def build_dense_from_covariance(n: int, D: int, ensemble: str = "GUE", J: float = 1.0, max_rows: int = DEFAULT_MAX_ROWS) -> np.ndarray:
    """Generator ``-1/2 E[K^2]`` with ``K = sum_k H_(I_k) - sum_k H*_(J_k)``.

    The noise is normalized so that ``E[H^2] = J``; spectrum terms are not
    included.
    """
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    size = check_budget(n, D, max_rows)
    basis = hermitian_basis(D, ensemble)
    scale = J / sum(b @ b for b in basis)[0, 0].real
    out = np.zeros((size, size), dtype=complex)
    for b in basis:
        k = np.zeros((size, size), dtype=complex)
        for s in range(2 * n):
            local = b if s % 2 == 0 else -b.conj()
            k += np.kron(np.kron(np.eye(D**s), local), np.eye(D ** (2 * n - s - 1)))
        out += -0.5 * scale * (k @ k)
    return out


def dense_expm(g: DenseGenerator, t: float) -> np.ndarray:
    """``exp(L t)`` by scaling and squaring (scipy)."""
    if t < 0:
        raise DomainError("evolution time must be non-negative")
    return expm(g.matrix * t)


def full_pairing_vector(n: int, D: int) -> np.ndarray:
    """Packed vector of ``prod_k delta(I_k, J_k)`` (the identity operator on every replica)."""
    out = np.zeros(D ** (2 * n))
    for idx in itertools.product(range(D), repeat=n):
        k = 0
        for x in idx:
            k = (k * D + x) * D + x
        out[k] = 1.0
    return out


def haar_unitary(D: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def replica_unitary(V: np.ndarray, n: int) -> np.ndarray:
    """``V (x) V* (x) ... `` in packed slot order ``(I_1, J_1, ..., I_n, J_n)``."""
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        out = np.kron(np.kron(out, V), V.conj())
    return out


def commutator_norm(g: DenseGenerator, V: np.ndarray) -> float:
    W = replica_unitary(V, g.n)
    return float(np.max(np.abs(g.matrix @ W - W @ g.matrix)))


def check_unitary_symmetry(g: DenseGenerator, trials: int = 20, seed: int = 0, require_zero_E: bool = True) -> float:
    """Largest ``||[L, V^n (x) V*^n]||_max / ||L||_max`` over random unitaries."""
    if require_zero_E and not g.E.is_zero():
        raise DomainError("the unitary symmetry needs a trivial spectrum")
    rng = np.random.default_rng(seed)
    scale = np.max(np.abs(g.matrix))
    worst = 0.0
    for _ in range(trials):
        worst = max(worst, commutator_norm(g, haar_unitary(g.D, rng)) / scale)
    return worst
