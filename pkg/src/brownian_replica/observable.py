"""Averaged correlators from graph contractions.

For ``n`` replicas and operators ``O_1 .. O_{2n}`` the correlator is

    E Tr(O_1(t) O_2 O_3(t) O_4 ... O_{2n-1}(t) O_{2n}),   O(t) = U^dag O U,

which is ``sum U_n[(I, J), (I', J')] prod_k O_{2k-1}[J_k, I_k] O_{2k}[I'_k, J'_{k+1}]``
(replica indices cyclic).  A graph contracted with the operators falls apart
into closed loops: graph deltas are free paths, operators are bridges between
``J_k``/``I_k`` and ``I'_k``/``J'_{k+1}``.  Each loop is the trace of the
bridge matrices met along it, transposed when a bridge is crossed from its
column end.  The spectral phase is absorbed as ``O_{2k-1} -> e^{iEt} O e^{-iEt}``.
"""
from __future__ import annotations

import string
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError
from .evolution import SpectrumE, _as_spectrum, generator_matrix, solve_f
from .graph import Graph, compose, embed_graph

Endpoint = tuple[str, int, int]


def _check_ops(ops, n: int) -> list[np.ndarray]:
    ops = [np.asarray(o, dtype=complex) for o in ops]
    if len(ops) != 2 * n:
        raise SizeError(f"need {2 * n} operators for n={n}, got {len(ops)}")
    D = ops[0].shape[0]
    for o in ops:
        if o.shape != (D, D):
            raise SizeError(f"operators must all be {D}x{D}, got {o.shape}")
        if not np.all(np.isfinite(o)):
            raise DomainError("operator entries must be finite")
    return ops


def heisenberg_ops(ops, E, times) -> list[np.ndarray]:
    """Absorb the spectral phase: ``O_{2k-1} -> e^{iE t_k} O_{2k-1} e^{-iE t_k}``."""
    D = ops[0].shape[0]
    spec = _as_spectrum(E, D)
    if spec.is_zero():
        return list(ops)
    out = list(ops)
    for k, t in enumerate(times):
        ph = np.exp(1j * spec.E * t)
        out[2 * k] = ph[:, None] * ops[2 * k] * ph.conj()[None, :]
    return out


def _bridges(n: int) -> dict[Endpoint, tuple[int, bool, Endpoint]]:
    """Operator bridges: endpoint -> (operator index, endpoint is the row end, other end)."""
    out = {}
    for k in range(n):
        row, col = ("L", 1, k), ("L", 0, k)
        out[row] = (2 * k, True, col)
        out[col] = (2 * k, False, row)
        row, col = ("R", 0, k), ("R", 1, (k + 1) % n)
        out[row] = (2 * k + 1, True, col)
        out[col] = (2 * k + 1, False, row)
    return out


_BRIDGE_CACHE: dict[int, dict] = {}


def loop_structure(g: Graph) -> list[list[tuple[int, bool]]]:
    """Closed loops of ``g`` with the bridges, as ``(operator index, transposed)`` sequences."""
    n = g.n
    bridges = _BRIDGE_CACHE.setdefault(n, _bridges(n))
    partner = {}
    for e in g.edges():
        x, y = tuple(e)
        partner[x], partner[y] = y, x
    seen = set()
    loops = []
    for start in bridges:
        if start in seen:
            continue
        loop = []
        x = start
        while True:
            idx, is_row, other = bridges[x]
            seen.add(x)
            seen.add(other)
            loop.append((idx, not is_row))
            x = partner[other]
            if x == start:
                break
        loops.append(loop)
    return loops


def contract_graph(g: Graph, ops, E=None, t: float = 0.0) -> complex:
    """Contraction of one graph with the operators (phase ``exp(-iEt)`` included)."""
    ops = _check_ops(ops, g.n)
    ops = heisenberg_ops(ops, E, [t] * g.n)
    return _contract(g, ops)


def _contract(g: Graph, ops: list[np.ndarray]) -> complex:
    value = 1.0 + 0j
    for loop in loop_structure(g):
        mat = None
        for idx, transposed in loop:
            o = ops[idx].T if transposed else ops[idx]
            mat = o if mat is None else mat @ o
        value *= np.trace(mat)
    return complex(value)


def dense_operator_tensor(ops) -> np.ndarray:
    """``W[(I, J), (I', J')] = prod_k O_{2k-1}[J_k, I_k] O_{2k}[I'_k, J'_{k+1}]`` as a matrix."""
    ops = [np.asarray(o, dtype=complex) for o in ops]
    n = len(ops) // 2
    D = ops[0].shape[0]
    letters = iter(string.ascii_letters)
    I = [next(letters) for _ in range(n)]
    Jl = [next(letters) for _ in range(n)]
    Ip = [next(letters) for _ in range(n)]
    Jp = [next(letters) for _ in range(n)]
    terms = []
    for k in range(n):
        terms.append(Jl[k] + I[k])
        terms.append(Ip[k] + Jp[(k + 1) % n])
    out_idx = "".join(I[k] + Jl[k] for k in range(n)) + "".join(Ip[k] + Jp[k] for k in range(n))
    W = np.einsum(",".join(terms) + "->" + out_idx, *ops)
    return W.reshape(D ** (2 * n), D ** (2 * n))


def dense_contraction(U: np.ndarray, ops) -> complex:
    """``sum U * W`` with the explicit Kronecker-delta layout."""
    return complex(np.sum(U * dense_operator_tensor(ops)))


@dataclass(frozen=True)
class CorrelatorResult:
    value: complex
    f: np.ndarray
    per_category: np.ndarray  # sum of member contractions, without f

    def as_dict(self, names) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "per_category": [
                {"label": name, "f": [complex(fa).real, complex(fa).imag], "contraction": [c.real, c.imag]}
                for name, fa, c in zip(names, self.f, self.per_category)
            ],
        }


def category_contractions(n: int, ops: list[np.ndarray]) -> np.ndarray:
    basis = generator_matrix(n).basis
    return np.array([sum(_contract(g, ops) for g in cat.members) for cat in basis.categories])


def correlator_details(n: int, ops, D: int, J: float = 1.0, E=None, t: float = 0.0) -> CorrelatorResult:
    ops = _check_ops(ops, n)
    if ops[0].shape[0] != D:
        raise SizeError(f"operators are {ops[0].shape[0]}x{ops[0].shape[0]}, expected D={D}")
    f = solve_f(n, D, J, t)
    per = category_contractions(n, heisenberg_ops(ops, E, [t] * n))
    return CorrelatorResult(complex(np.dot(f, per)), f, per)


def correlator(n: int, ops, D: int, J: float = 1.0, E=None, t: float = 0.0) -> complex:
    """``E Tr(O_1(t) O_2 ... O_{2n-1}(t) O_{2n})`` from the category expansion."""
    return correlator_details(n, ops, D, J, E, t).value


def _weighted_graphs(n: int, f: np.ndarray) -> dict[Graph, complex]:
    out: dict[Graph, complex] = {}
    for fa, cat in zip(f, generator_matrix(n).basis.categories):
        if fa == 0:
            continue
        for g in cat.members:
            out[g] = out.get(g, 0) + fa
    return out


def _compose_combos(a: dict[Graph, complex], b: dict[Graph, complex], D: int) -> dict[Graph, complex]:
    out: dict[Graph, complex] = defaultdict(complex)
    for g1, c1 in a.items():
        for g2, c2 in b.items():
            g, loops = compose(g1, g2)
            out[g] += c1 * c2 * D**loops
    return dict(out)


def multi_time_correlator(ops, D: int, J: float = 1.0, E=None, times=(0.0, 0.0, 0.0)) -> complex:
    """``E Tr(O_1(t_1) O_2 O_3(t_2) O_4 O_5(t_3) O_6)`` for ``t_1 <= t_2 <= t_3``.

    The averaged three-replica evolution is the composition
    ``[1 (x) 1 (x) U_1(t_3 - t_2)] [1 (x) U_2(t_2 - t_1)] U_3(t_1)``, built here
    as a product of graph combinations.
    """
    ops = _check_ops(ops, 3)
    t1, t2, t3 = (float(x) for x in times)
    if not (0 <= t1 <= t2 <= t3):
        raise DomainError("only ordered times 0 <= t1 <= t2 <= t3 are supported")
    if ops[0].shape[0] != D:
        raise SizeError(f"operators are {ops[0].shape[0]}x{ops[0].shape[0]}, expected D={D}")
    late = {embed_graph(g, 3, 2): c for g, c in _weighted_graphs(1, solve_f(1, D, J, t3 - t2)).items()}
    mid = {embed_graph(g, 3, 1): c for g, c in _weighted_graphs(2, solve_f(2, D, J, t2 - t1)).items()}
    first = _weighted_graphs(3, solve_f(3, D, J, t1))
    total = _compose_combos(_compose_combos(late, mid, D), first, D)
    ops = heisenberg_ops(ops, E, [t1, t2, t3])
    return complex(sum(c * _contract(g, ops) for g, c in total.items()))


def closed_system_trace(ops, E=None, times=None) -> complex:
    """``Tr(O_1(t_1) O_2 O_3(t_2) ...)`` with ``O(t) = e^{iEt} O e^{-iEt}`` and no noise."""
    ops = [np.asarray(o, dtype=complex) for o in ops]
    n = len(ops) // 2
    times = [0.0] * n if times is None else list(times)
    ops = heisenberg_ops(ops, E, times)
    mat = np.eye(ops[0].shape[0], dtype=complex)
    for o in ops:
        mat = mat @ o
    return complex(np.trace(mat))


def random_ops(n: int, D: int, rng: np.random.Generator, hermitian: bool = False) -> list[np.ndarray]:
    out = []
    for _ in range(2 * n):
        z = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
        out.append((z + z.conj().T) / 2 if hermitian else z)
    return out
