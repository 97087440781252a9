"""Individual replica diagrams ("graphs") and their dense realization.

A graph on ``n`` replicas is written ``prod_k c_{a_k b_k} c[s1 (x) s2]``: ``p``
connected pairs ``(a_k, b_k)`` between an unbarred contour ``a_k`` and a barred
contour ``b_k`` plus a permutation pair.  As a ``D^{2n} x D^{2n}`` matrix it is
the product of Kronecker deltas

* ``I_i = I'_{s1(i)}`` for unpaired unbarred ``i``,
* ``J_j = J'_{s2(j)}`` for unpaired barred ``j``,
* ``I_{a_k} = J_{b_k}`` and ``I'_{s1(a_k)} = J'_{s2(b_k)}`` for every pair.

Dense index packing: row multi-index ``(I_1, J_1, ..., I_n, J_n)`` and column
multi-index ``(I'_1, J'_1, ..., I'_n, J'_n)`` are flattened in C order, so
``I_1`` is the most significant digit and ``J_n`` the least.
"""
from __future__ import annotations

import itertools
import math
import re
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceError, SizeError
from .perm import Perm, all_perms

DEFAULT_MAX_ROWS = 4096


class Graph:
    """One diagram: ``n``, connected ``pairs`` (zero-based ``(a, b)``), ``s1``, ``s2``.

    Instances are immutable and hashable.  Equality compares the stored
    representative; call :meth:`canonical` (or :func:`canonicalize`) before
    comparing graphs that may differ by a gauge transformation.
    """

    __slots__ = ("n", "pairs", "s1", "s2", "_hash")

    def __init__(self, n: int, pairs: Iterable[Sequence[int]], s1: Sequence[int], s2: Sequence[int]):
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        s1 = s1 if isinstance(s1, Perm) else Perm(s1)
        s2 = s2 if isinstance(s2, Perm) else Perm(s2)
        if len(s1) != n or len(s2) != n:
            raise SizeError(f"permutations must act on {n} contours")
        if len(pairs) > n:
            raise DomainError(f"{len(pairs)} pairs on {n} replicas")
        tops = [a for a, _ in pairs]
        bots = [b for _, b in pairs]
        if len(set(tops)) != len(tops) or len(set(bots)) != len(bots):
            raise DomainError(f"pair endpoints must be distinct: {pairs}")
        if any(not 0 <= x < n for x in tops + bots):
            raise DomainError(f"pair label out of range: {pairs}")
        self._set(n, pairs, s1, s2)

    def _set(self, n, pairs, s1, s2):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "_hash", hash((n, pairs, s1, s2)))

    @classmethod
    def _raw(cls, n: int, pairs: tuple, s1: tuple, s2: tuple) -> "Graph":
        g = object.__new__(cls)
        g._set(n, pairs, Perm._trusted(s1), Perm._trusted(s2))
        return g

    def __setattr__(self, key, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def identity(cls, n: int) -> "Graph":
        return cls._raw(n, (), tuple(range(n)), tuple(range(n)))

    @property
    def p(self) -> int:
        return len(self.pairs)

    def _key(self):
        return (self.n, self.pairs, tuple(self.s1), tuple(self.s2))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._hash == other._hash and self._key() == other._key()

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Graph") -> bool:
        return sort_key(self) < sort_key(other)

    def __repr__(self) -> str:
        return f"Graph({serialize(self)!r})"

    def canonical(self) -> "Graph":
        return canonicalize(self)

    def is_canonical(self) -> bool:
        return canonicalize(self) == self

    def right_pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs formed among the primed (right-hand) indices."""
        return tuple(sorted((self.s1[a], self.s2[b]) for a, b in self.pairs))

    def edges(self) -> frozenset[frozenset[tuple[str, int, int]]]:
        """The graph as a perfect matching of its ``4n`` endpoints.

        Endpoints are ``(side, bar, k)`` with side ``"L"``/``"R"`` and bar 0
        (unbarred, index ``I``) or 1 (barred, index ``J``).  Two graphs are
        the same tensor exactly when their matchings agree.
        """
        out = []
        paired_a = {a for a, _ in self.pairs}
        paired_b = {b for _, b in self.pairs}
        for i in range(self.n):
            if i not in paired_a:
                out.append(frozenset({("L", 0, i), ("R", 0, self.s1[i])}))
            if i not in paired_b:
                out.append(frozenset({("L", 1, i), ("R", 1, self.s2[i])}))
        for a, b in self.pairs:
            out.append(frozenset({("L", 0, a), ("L", 1, b)}))
            out.append(frozenset({("R", 0, self.s1[a]), ("R", 1, self.s2[b])}))
        return frozenset(out)


def sort_key(g: Graph):
    """Total order used for canonical representatives and deterministic output."""
    return (g.p, g.pairs, tuple(g.s1), tuple(g.s2))


def _canonical_parts(n, pairs, s1, s2):
    """Fast path returning canonical ``(pairs, s1, s2)`` tuples."""
    if not pairs:
        return (), tuple(s1), tuple(s2)
    left = sorted(pairs)
    right = sorted((s1[a], s2[b]) for a, b in pairs)
    t1 = list(s1)
    t2 = list(s2)
    for (a, b), (ra, rb) in zip(left, right):
        t1[a] = ra
        t2[b] = rb
    return tuple(left), tuple(t1), tuple(t2)


def canonicalize(g: Graph) -> Graph:
    """Lexicographically smallest member of the gauge orbit of ``g``.

    Pairs are listed in ascending order of the unbarred label; among the
    ``p!`` gauge images the one with the smallest ``(s1, s2)`` is chosen.
    That minimum has ``s1`` increasing on the paired positions, so it is
    built directly instead of by scanning the orbit.
    """
    pairs, s1, s2 = _canonical_parts(g.n, g.pairs, g.s1, g.s2)
    return Graph._raw(g.n, pairs, s1, s2)


def gauge_act(g: Graph, tau: Sequence[int]) -> Graph:
    """Apply the gauge element ``tau`` in ``S_p`` to ``g``.

    ``tau`` permutes the pair slots: slot ``k`` becomes pair ``tau[k]``.
    The induced ``(t1, t2)`` swaps ``a_k -> a_{tau[k]}`` and
    ``b_k -> b_{tau[k]}``; the result is ``prod c_{t1(a) t2(b)} c[s o t]``,
    which is the same tensor as ``g``.
    """
    tau = tuple(tau)
    if sorted(tau) != list(range(g.p)):
        raise SizeError(f"gauge element must permute {g.p} pair slots, got {tau}")
    t1 = list(range(g.n))
    t2 = list(range(g.n))
    for k, (a, b) in enumerate(g.pairs):
        a2, b2 = g.pairs[tau[k]]
        t1[a] = a2
        t2[b] = b2
    pairs = tuple((t1[a], t2[b]) for a, b in g.pairs)
    s1 = tuple(g.s1[x] for x in t1)
    s2 = tuple(g.s2[x] for x in t2)
    return Graph(g.n, pairs, s1, s2)


def gauge_orbit(g: Graph) -> list[Graph]:
    """All ``p!`` gauge images of ``g`` (with pairs kept in ascending order)."""
    out = []
    for tau in itertools.permutations(range(g.p)):
        h = gauge_act(g, tau)
        out.append(Graph(h.n, sorted(h.pairs), h.s1, h.s2))
    return out


def relabel(g: Graph, rho: Sequence[int], rho_bar: Sequence[int]) -> Graph:
    """Rename unbarred contours by ``rho`` and barred ones by ``rho_bar`` on both sides."""
    inv = [0] * g.n
    inv_bar = [0] * g.n
    for i in range(g.n):
        inv[rho[i]] = i
        inv_bar[rho_bar[i]] = i
    pairs = tuple((rho[a], rho_bar[b]) for a, b in g.pairs)
    s1 = tuple(rho[g.s1[inv[i]]] for i in range(g.n))
    s2 = tuple(rho_bar[g.s2[inv_bar[i]]] for i in range(g.n))
    return Graph._raw(g.n, *_canonical_parts(g.n, pairs, s1, s2))


def bar_swap(g: Graph) -> Graph:
    """Exchange the roles of unbarred and barred contours."""
    pairs = tuple((b, a) for a, b in g.pairs)
    return Graph._raw(g.n, *_canonical_parts(g.n, pairs, g.s2, g.s1))


def count_graphs(n: int, p: int | None = None) -> int:
    """``sum_p (n! C(n, p))^2`` or a single term of it."""
    ps = range(n + 1) if p is None else [p]
    return sum((math.factorial(n) * math.comb(n, q)) ** 2 for q in ps)


def _pair_sets(n: int, p: int) -> Iterator[tuple[tuple[int, int], ...]]:
    for tops in itertools.combinations(range(n), p):
        for bots in itertools.combinations(range(n), p):
            for perm in itertools.permutations(bots):
                yield tuple(zip(tops, perm))


def enumerate_graphs(n: int, p: int | None = None) -> list[Graph]:
    """Every distinct graph on ``n`` replicas (optionally only those with ``p`` pairs).

    A canonical graph is fixed by its left pair set, its right pair set and
    the two bijections carrying unpaired left contours to unpaired right
    ones, so the canonical forms are generated directly.
    """
    if n < 1:
        raise DomainError("need at least one replica")
    out = []
    for q in range(n + 1) if p is None else [p]:
        for left in _pair_sets(n, q):
            la = [i for i in range(n) if i not in {a for a, _ in left}]
            lb = [i for i in range(n) if i not in {b for _, b in left}]
            for right in _pair_sets(n, q):
                ra = [i for i in range(n) if i not in {a for a, _ in right}]
                rb = [i for i in range(n) if i not in {b for _, b in right}]
                s1 = [0] * n
                s2 = [0] * n
                for (a, b), (x, y) in zip(left, right):
                    s1[a] = x
                    s2[b] = y
                for img1 in itertools.permutations(ra):
                    for i, x in zip(la, img1):
                        s1[i] = x
                    for img2 in itertools.permutations(rb):
                        for j, y in zip(lb, img2):
                            s2[j] = y
                        out.append(Graph._raw(n, *_canonical_parts(n, left, s1, s2)))
    return out


def enumerate_raw(n: int) -> Iterator[Graph]:
    """All ``(pairs, s1, s2)`` representatives, gauge copies included."""
    perms = all_perms(n)
    for q in range(n + 1):
        for pairs in _pair_sets(n, q):
            for s1 in perms:
                for s2 in perms:
                    yield Graph._raw(n, pairs, tuple(s1), tuple(s2))


def _edge_axes(g: Graph) -> list[tuple[int, int]]:
    """Matching expressed on tensor axes (0..2n-1 rows, 2n..4n-1 columns)."""
    n = g.n
    out = []
    paired_a = {a for a, _ in g.pairs}
    paired_b = {b for _, b in g.pairs}
    for i in range(n):
        if i not in paired_a:
            out.append((2 * i, 2 * n + 2 * g.s1[i]))
        if i not in paired_b:
            out.append((2 * i + 1, 2 * n + 2 * g.s2[i] + 1))
    for a, b in g.pairs:
        out.append((2 * a, 2 * b + 1))
        out.append((2 * n + 2 * g.s1[a], 2 * n + 2 * g.s2[b] + 1))
    return out


def check_budget(n: int, D: int, max_rows: int = DEFAULT_MAX_ROWS) -> int:
    if D < 1:
        raise DomainError("dimension D must be positive")
    rows = D ** (2 * n)
    if rows > max_rows:
        raise ResourceError(f"D^(2n) = {rows} rows exceeds the budget of {max_rows}")
    return rows


def to_dense(g: Graph, D: int, max_rows: int = DEFAULT_MAX_ROWS, dtype=float) -> np.ndarray:
    """The ``D^{2n} x D^{2n}`` 0/1 matrix of Kronecker deltas represented by ``g``."""
    rows = check_budget(g.n, D, max_rows)
    out = np.zeros((rows, rows), dtype=dtype)
    out[_nonzero_index(g, D)] = 1
    return out


def _nonzero_index(g: Graph, D: int) -> tuple[np.ndarray, np.ndarray]:
    n = g.n
    edges = _edge_axes(g)
    free = np.indices((D,) * len(edges)).reshape(len(edges), -1)
    axis_vals = np.empty((4 * n, free.shape[1]), dtype=np.int64)
    for e, (x, y) in enumerate(edges):
        axis_vals[x] = free[e]
        axis_vals[y] = free[e]
    weights = D ** np.arange(2 * n - 1, -1, -1, dtype=np.int64)
    return weights @ axis_vals[: 2 * n], weights @ axis_vals[2 * n :]


def sum_dense(graphs: Iterable[Graph], D: int, max_rows: int = DEFAULT_MAX_ROWS) -> np.ndarray:
    """Dense sum of several graphs (a category, say)."""
    graphs = list(graphs)
    if not graphs:
        raise DomainError("empty graph collection")
    rows = check_budget(graphs[0].n, D, max_rows)
    out = np.zeros((rows, rows))
    for g in graphs:
        np.add.at(out, _nonzero_index(g, D), 1.0)
    return out


_TEXT = re.compile(r"^(\d+):\[(.*)\];s1:\[([\d,\s]*)\];s2:\[([\d,\s]*)\]$")


def serialize(g: Graph) -> str:
    """Compact one-based text form ``p:[(a,b)...];s1:[...];s2:[...]``."""
    pairs = ",".join(f"({a + 1},{b + 1})" for a, b in g.pairs)
    s1 = ",".join(str(x) for x in g.s1.one_line())
    s2 = ",".join(str(x) for x in g.s2.one_line())
    return f"{g.p}:[{pairs}];s1:[{s1}];s2:[{s2}]"


def parse(text: str) -> Graph:
    """Inverse of :func:`serialize`."""
    m = _TEXT.match(text.replace(" ", ""))
    if not m:
        raise DomainError(f"cannot parse graph text {text!r}")
    p = int(m.group(1))
    pairs = [(int(a) - 1, int(b) - 1) for a, b in re.findall(r"\((\d+),(\d+)\)", m.group(2))]
    if len(pairs) != p:
        raise DomainError(f"pair count {p} does not match {len(pairs)} listed pairs")
    s1 = [int(x) for x in m.group(3).split(",") if x]
    s2 = [int(x) for x in m.group(4).split(",") if x]
    return Graph(len(s1), pairs, Perm.from_one_line(s1), Perm.from_one_line(s2))


def graph_from_matching(n: int, edges: Iterable[Iterable[tuple[str, int, int]]]) -> Graph:
    """Inverse of :meth:`Graph.edges` for a matching of the ``4n`` endpoints.

    Left-left edges must join an unbarred and a barred endpoint (a pair), as
    must right-right edges; left-right edges must keep the bar.
    """
    left: list[tuple[int, int]] = []
    right: list[tuple[int, int]] = []
    s1 = [None] * n
    s2 = [None] * n
    for edge in edges:
        x, y = sorted(edge)
        if x[0] == y[0]:
            if x[1] == y[1]:
                raise DomainError(f"edge {x}-{y} joins two endpoints of the same bar")
            a, b = (x[2], y[2]) if x[1] == 0 else (y[2], x[2])
            (left if x[0] == "L" else right).append((a, b))
        else:
            if x[1] != y[1]:
                raise DomainError(f"edge {x}-{y} changes the bar across the diagram")
            (s1 if x[1] == 0 else s2)[x[2]] = y[2]
    if len(left) != len(right):
        raise DomainError("left and right pair counts differ")
    left.sort()
    right.sort()
    for (a, b), (x, y) in zip(left, right):
        s1[a] = x
        s2[b] = y
    if None in s1 or None in s2:
        raise DomainError("matching does not cover every endpoint")
    return Graph(n, left, s1, s2)


def compose(g1: Graph, g2: Graph) -> tuple[Graph, int]:
    """Matrix product ``g1 @ g2 = D**loops * g3``; returns ``(g3, loops)``.

    The right endpoints of ``g1`` are glued to the left endpoints of ``g2``;
    paths through the glued points become edges of ``g3`` and closed loops
    contribute a factor ``D`` each.
    """
    if g1.n != g2.n:
        raise SizeError("cannot compose graphs on different replica counts")
    n = g1.n
    p1: dict = {}
    for e in g1.edges():
        x, y = tuple(e)
        p1[x], p1[y] = y, x
    p2: dict = {}
    for e in g2.edges():
        x, y = tuple(e)
        p2[x], p2[y] = y, x
    seen_mid: set = set()
    out_edges = []
    # endpoints of the product: ("L", ...) of g1 and ("R", ...) of g2
    starts = [("A", ("L", b, k)) for b in (0, 1) for k in range(n)] + [("B", ("R", b, k)) for b in (0, 1) for k in range(n)]
    done: set = set()
    for side, x in starts:
        if (side, x) in done:
            continue
        cur_side, cur = side, x
        while True:
            part = (p1 if cur_side == "A" else p2)[cur]
            if cur_side == "A" and part[0] == "L":
                end = ("A", part)
                break
            if cur_side == "B" and part[0] == "R":
                end = ("B", part)
                break
            mid = (part[1], part[2])
            seen_mid.add(mid)
            if cur_side == "A":
                cur_side, cur = "B", ("L",) + mid
            else:
                cur_side, cur = "A", ("R",) + mid
        done.add((side, x))
        done.add(end)
        ends = []
        for s, pt in ((side, x), end):
            ends.append(("L", pt[1], pt[2]) if s == "A" else ("R", pt[1], pt[2]))
        out_edges.append(frozenset(ends))
    loops = 0
    for b in (0, 1):
        for k in range(n):
            if (b, k) in seen_mid:
                continue
            loops += 1
            cur = ("R", b, k)
            while True:
                seen_mid.add((cur[1], cur[2]))
                nxt = p2[("L", cur[1], cur[2])]
                seen_mid.add((nxt[1], nxt[2]))
                cur = p1[("R", nxt[1], nxt[2])]
                if (cur[1], cur[2]) == (b, k):
                    break
    return graph_from_matching(n, out_edges), loops


def embed_graph(g: Graph, n: int, offset: int) -> Graph:
    """Place ``g`` on replicas ``offset .. offset + g.n - 1`` of ``n``, identity elsewhere."""
    if offset < 0 or offset + g.n > n:
        raise SizeError(f"cannot place {g.n} replicas at offset {offset} in {n}")
    s1 = list(range(n))
    s2 = list(range(n))
    for k in range(g.n):
        s1[offset + k] = offset + g.s1[k]
        s2[offset + k] = offset + g.s2[k]
    pairs = [(a + offset, b + offset) for a, b in g.pairs]
    return canonicalize(Graph(n, pairs, s1, s2))
