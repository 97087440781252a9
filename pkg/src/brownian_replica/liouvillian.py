"""Action of the replica generator on graphs and its compact category matrix.

The generator on ``n`` replicas is

    L = w I + (J/D) sum_{i, j} P_{i jbar} - (J/D) sum_{i<j} (X_{ij} + X_{ibar jbar})

with ``w = -i E - nJ`` carrying the intrinsic spectrum.  ``w`` commutes with
every term, so it is handled as a plain symbol here.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator

import numpy as np

from .coeff import Coeff, D as D_SYM, J as J_SYM, ONE, W as W_SYM
from .errors import ConsistencyError, DomainError
from .graph import Graph, _canonical_parts

if TYPE_CHECKING:
    from .category import Basis, Category


class GraphCombo(dict):
    """Linear combination ``{Graph: Coeff}`` with zero terms dropped."""

    def add(self, g: Graph, c: Coeff) -> None:
        total = self.get(g, Coeff()) + c
        if total:
            self[g] = total
        else:
            self.pop(g, None)

    def __add__(self, other: "GraphCombo") -> "GraphCombo":
        out = GraphCombo(self)
        for g, c in other.items():
            out.add(g, c)
        return out

    def scaled(self, c: Coeff) -> "GraphCombo":
        out = GraphCombo()
        for g, k in self.items():
            out.add(g, k * c)
        return out


def _star(g: Graph, t1: tuple[int, ...] | None, t2: tuple[int, ...] | None) -> Graph:
    """``(t1 (x) t2) * g``: rename pair labels by ``t`` and right-compose ``s`` with ``t``."""
    pairs = g.pairs
    s1, s2 = g.s1, g.s2
    if t1 is not None:
        pairs = tuple((t1[a], b) for a, b in pairs)
        s1 = tuple(s1[x] for x in t1)
    if t2 is not None:
        pairs = tuple((a, t2[b]) for a, b in pairs)
        s2 = tuple(s2[x] for x in t2)
    return Graph._raw(g.n, *_canonical_parts(g.n, pairs, s1, s2))


def _swap(n: int, i: int, j: int) -> tuple[int, ...]:
    t = list(range(n))
    t[i], t[j] = j, i
    return tuple(t)


def _check_label(n: int, *labels: int) -> None:
    for x in labels:
        if not 0 <= x < n:
            raise DomainError(f"contour label {x} out of range for n={n}")


def act_P(i: int, j: int, g: Graph) -> GraphCombo:
    """``P_{i jbar} g`` by the five-case rule.

    * neither endpoint paired: add the pair ``c_{i jbar}``;
    * ``i`` paired with ``b1``: ``X_{jbar b1bar} * g``;
    * ``jbar`` paired with ``a1``: ``X_{i a1} * g``;
    * ``(i, jbar)`` already a pair: ``D g`` (a closed loop);
    * ``i`` and ``jbar`` in different pairs ``(i, b1)``, ``(a2, jbar)``: ``X_{i a2} * g``.
    """
    n = g.n
    _check_label(n, i, j)
    ka = kb = None
    for k, (a, b) in enumerate(g.pairs):
        if a == i:
            ka = k
        if b == j:
            kb = k
    out = GraphCombo()
    if ka is None and kb is None:
        pairs = g.pairs + ((i, j),)
        out.add(Graph._raw(n, *_canonical_parts(n, pairs, g.s1, g.s2)), ONE)
    elif kb is None:
        b1 = g.pairs[ka][1]
        out.add(_star(g, None, _swap(n, j, b1)), ONE)
    elif ka is None:
        a1 = g.pairs[kb][0]
        out.add(_star(g, _swap(n, i, a1), None), ONE)
    elif ka == kb:
        out.add(g.canonical(), D_SYM)
    else:
        a2 = g.pairs[kb][0]
        out.add(_star(g, _swap(n, i, a2), None), ONE)
    return out


def act_X(i: int, j: int, g: Graph, barred: bool = False) -> Graph:
    """``X_{ij} g`` (or ``X_{ibar jbar} g``), which always equals ``X * g``."""
    _check_label(g.n, i, j)
    if i == j:
        raise DomainError("an exchange needs two distinct contours")
    t = _swap(g.n, i, j)
    return _star(g, None, t) if barred else _star(g, t, None)


def generator_terms(g: Graph) -> Iterator[tuple[Graph, int]]:
    """Off-diagonal terms of ``L g`` as ``(graph, sign)``; each carries ``sign * J/D``.

    The diagonal part is ``(w + p J) g``.  Pair terms add a pair disjoint from
    every existing one; exchange terms use transpositions that avoid all
    paired labels on their side.
    """
    n = g.n
    pairs, s1, s2 = _canonical_parts(n, g.pairs, g.s1, g.s2)
    used_a = {a for a, _ in pairs}
    used_b = {b for _, b in pairs}
    free_a = [i for i in range(n) if i not in used_a]
    free_b = [j for j in range(n) if j not in used_b]
    for i in free_a:
        for j in free_b:
            yield Graph._raw(n, *_canonical_parts(n, pairs + ((i, j),), s1, s2)), 1
    for x, i in enumerate(free_a):
        for k in free_a[x + 1 :]:
            t = list(s1)
            t[i], t[k] = s1[k], s1[i]
            yield Graph._raw(n, pairs, tuple(t), tuple(s2)), -1
    for x, j in enumerate(free_b):
        for k in free_b[x + 1 :]:
            t = list(s2)
            t[j], t[k] = s2[k], s2[j]
            yield Graph._raw(n, pairs, tuple(s1), tuple(t)), -1


def act_L(g: Graph) -> GraphCombo:
    """``L g = (w + pJ) g + (J/D)[sum c_u g - sum g[s X_u] - sum g[s X_ubar]]``."""
    out = GraphCombo()
    out.add(g.canonical(), W_SYM + J_SYM * g.p)
    jd = Coeff.j_over_d()
    for h, sign in generator_terms(g):
        out.add(h, jd * sign)
    return out


def act_L_by_parts(g: Graph) -> GraphCombo:
    """``L g`` assembled from every ``P``, ``X`` and ``Xbar`` term separately."""
    n = g.n
    jd = Coeff.j_over_d()
    out = GraphCombo()
    out.add(g.canonical(), W_SYM)
    for i in range(n):
        for j in range(n):
            for h, c in act_P(i, j, g).items():
                out.add(h, c * jd)
    for i in range(n):
        for j in range(i + 1, n):
            out.add(act_X(i, j, g), -jd)
            out.add(act_X(i, j, g, barred=True), -jd)
    return out


def act_on_category(category: "Category", basis: "Basis") -> dict[int, Coeff]:
    """Expand ``L`` applied to a category sum over the categories of ``basis``.

    Returns ``{category index: coefficient}``.  Raises
    :class:`ConsistencyError` if some image graph is not covered by the basis
    or if a category is hit non-uniformly (the basis would not be closed).
    """
    counts: dict[Graph, int] = defaultdict(int)
    for g in category.members:
        for h, sign in generator_terms(g):
            counts[h] += sign
    per_cat: dict[int, dict[Graph, int]] = defaultdict(dict)
    for h, c in counts.items():
        if c == 0:
            continue
        idx = basis.index_of(h)
        if idx is None:
            raise ConsistencyError(f"graph {h!r} is not covered by the basis")
        per_cat[idx][h] = c
    alpha = basis.index_of(next(iter(category.members)))
    out: dict[int, Coeff] = {alpha: W_SYM + J_SYM * category.p}
    for idx, hits in per_cat.items():
        target = basis.categories[idx]
        values = set(hits.values())
        if len(values) != 1 or len(hits) != len(target.members):
            raise ConsistencyError(
                f"L maps category {category.name} non-uniformly onto {target.name}: {sorted(values)}"
            )
        out[idx] = out.get(idx, Coeff()) + Coeff.j_over_d(values.pop())
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class GeneratorMatrix:
    """Compact matrix ``M`` with ``L F_alpha = sum_beta M[beta, alpha] F_beta``.

    ``entries[beta][alpha]`` are exact :class:`Coeff` values in ``w``, ``J``
    and ``J/D``.  ``M = w_shift * 1 + M_J`` where substituting ``w = -nJ``
    gives ``M_J`` and the remaining ``-iE`` part is diagonal.
    """

    n: int
    basis: "Basis"
    entries: tuple[tuple[Coeff, ...], ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, beta: int, alpha: int) -> Coeff:
        return self.entries[beta][alpha]

    def mj_entries(self) -> list[list[Coeff]]:
        """Exact ``M_J``: every ``w`` replaced by ``-nJ``."""
        out = []
        for row in self.entries:
            new_row = []
            for c in row:
                k = Coeff()
                for (a, b, d), v in c.terms.items():
                    if a == 0:
                        k = k + Coeff({(0, b, d): v})
                    elif a == 1:
                        k = k + Coeff({(0, b + 1, d): -self.n * v})
                    else:
                        raise ConsistencyError("generator entries are affine in w")
                new_row.append(k)
            out.append(new_row)
        return out

    def mj_numeric(self, D: float, J: float = 1.0) -> np.ndarray:
        """Numeric ``M_J`` at dimension ``D`` and coupling ``J``."""
        return np.array([[c.evaluate(J=J, D=D) for c in row] for row in self.mj_entries()], dtype=float)

    def numeric(self, D: float, J: float = 1.0, w: complex = 0.0) -> np.ndarray:
        return np.array([[complex(c.evaluate(w=w, J=J, D=D)) for c in row] for row in self.entries])

    def to_sympy(self, mj: bool = False):
        import sympy

        rows = self.mj_entries() if mj else self.entries
        return sympy.Matrix([[c.to_sympy() for c in row] for row in rows])

    def as_strings(self, mj: bool = False) -> list[list[str]]:
        rows = self.mj_entries() if mj else self.entries
        return [[str(c) for c in row] for row in rows]


def build_M(n: int, basis: "Basis | None" = None) -> GeneratorMatrix:
    """Assemble ``M`` column by column from :func:`act_on_category`.

    Without an explicit ``basis`` the standard one of
    :func:`brownian_replica.category.standard_basis` is used.
    """
    from .category import standard_basis

    if basis is None:
        basis = standard_basis(n)
    size = len(basis.categories)
    cols = [act_on_category(cat, basis) for cat in basis.categories]
    entries = tuple(tuple(cols[a].get(b, Coeff()) for a in range(size)) for b in range(size))
    return GeneratorMatrix(n=n, basis=basis, entries=entries)


def combo_dense(combo: GraphCombo, D: int, w: float = 0.0, J: float = 1.0, max_rows: int | None = None) -> np.ndarray:
    """Dense matrix of a graph combination with symbols substituted numerically."""
    from .graph import DEFAULT_MAX_ROWS, to_dense

    out = None
    for g, c in combo.items():
        term = complex(c.evaluate(w=w, J=J, D=D)) * to_dense(g, D, max_rows or DEFAULT_MAX_ROWS)
        out = term if out is None else out + term
    return out


def iter_columns(matrix: GeneratorMatrix) -> Iterable[list[Coeff]]:
    for a in range(matrix.size):
        yield [matrix.entries[b][a] for b in range(matrix.size)]
