"""Graph categories: disjoint sets of graphs whose sums span an L-closed space.

Renaming replicas (unbarred and barred contours independently, on both
sides at once) and exchanging barred with unbarred contours commute with the
generator and fix ``c[I]``.  Every category is therefore a union of orbits of
that group.  An orbit is detected with a complete invariant: glue every left
endpoint to the right endpoint carrying the same label and read off the
closed loops that alternate between those "identity" edges and the edges of
the graph.  Orbits that ``L`` never tells apart are merged, which gives the
coarsest basis on which ``L`` still acts as a matrix.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ConsistencyError, DomainError
from .graph import Graph, bar_swap, canonicalize, count_graphs, enumerate_graphs, relabel
from .perm import Perm, all_perms, class_members, conditioned_class

OrbitKey = tuple


def _loop_words(g: Graph) -> list[tuple[tuple[int, int], ...]]:
    """Closed loops of ``g`` glued to the identity, as sequences of identity edges.

    Each identity edge is recorded as ``(bar, direction)`` with direction
    ``+1`` for left-to-right traversal.
    """
    n = g.n
    partner: dict[tuple[int, int, int], tuple[int, int, int]] = {}
    for edge in g.edges():
        x, y = tuple(edge)
        # sides encoded 0 = left, 1 = right
        xs = (0 if x[0] == "L" else 1, x[1], x[2])
        ys = (0 if y[0] == "L" else 1, y[1], y[2])
        partner[xs] = ys
        partner[ys] = xs
    seen = set()
    words = []
    for bar in (0, 1):
        for k in range(n):
            start = (0, bar, k)
            if start in seen:
                continue
            word = []
            x = start
            while True:
                seen.add(x)
                y = (1 - x[0], x[1], x[2])  # identity edge
                seen.add(y)
                word.append((x[1], 1 if x[0] == 0 else -1))
                x = partner[y]
                if x == start:
                    break
            words.append(tuple(word))
    return words


def _cyclic_min(word: tuple) -> tuple:
    rev = tuple((b, -d) for b, d in reversed(word))
    cands = []
    for w in (word, rev):
        for r in range(len(w)):
            cands.append(w[r:] + w[:r])
    return min(cands)


def orbit_key(g: Graph) -> OrbitKey:
    """Complete invariant of ``g`` under replica relabeling and bar exchange."""
    words = sorted(_cyclic_min(w) for w in _loop_words(g))
    swapped = sorted(_cyclic_min(tuple((1 - b, d) for b, d in w)) for w in words)
    return (g.p, min(tuple(words), tuple(swapped)))


def orbit(g: Graph) -> frozenset[Graph]:
    """The relabeling/bar-exchange orbit of ``g``, by brute force over the group."""
    perms = all_perms(g.n)
    out = set()
    for h in (canonicalize(g), bar_swap(g)):
        for rho in perms:
            for rho_bar in perms:
                out.add(relabel(h, rho, rho_bar))
    return frozenset(out)


def _relative_cycle_type(g: Graph) -> tuple[int, ...]:
    """Cycle type of ``R^{-1} o L`` for a fully paired graph.

    ``L`` sends each unbarred contour to its barred partner on the left,
    ``R`` does the same on the right; with the barred order fixed the graph
    is just this permutation of the unbarred labels.
    """
    left = dict(g.pairs)
    right_inv = {g.s2[b]: g.s1[a] for a, b in g.pairs}
    rho = [right_inv[left[a]] for a in range(g.n)]
    return Perm(rho).cycle_type()


def _ct_text(ct: tuple[int, ...]) -> str:
    if not ct:
        return "I"
    if ct == (2,):
        return "X"
    return "X_[" + ",".join(str(x) for x in sorted(ct)) + "]"


def _generic_label(g: Graph) -> tuple[str, str]:
    if g.p == 0:
        a = _ct_text(g.s1.cycle_type())
        b = _ct_text(g.s2.cycle_type())
        a, b = sorted((a, b), key=lambda s: (s != "I", len(s), s))
        if b == "I":
            return (a if a == "I" else f"{a}+{a}b"), ""
        return f"{a}.{b}b", ""
    if g.p == g.n:
        return _ct_text(_relative_cycle_type(g)), ""
    words = orbit_key(g)[1]
    text = ";".join("".join(("I" if b == 0 else "J") + (">" if d > 0 else "<") for b, d in w) for w in words)
    return "loops", text


@dataclass(frozen=True)
class Label:
    """Category label: pair count, permutation class text and condition signature.

    Identity is ``key``, the set of relabeling-orbit invariants covered by
    the category; the text fields are for people.
    """

    p: int
    perm_class: str
    signature: str
    key: frozenset = field(repr=False, compare=True)

    @property
    def name(self) -> str:
        sig = f"^({self.signature})" if self.signature else ""
        return f"F_{{{self.p},{self.perm_class}}}{sig}"


@dataclass(frozen=True)
class Category:
    """A named, disjoint set of canonical graphs with a common pair count."""

    label: Label
    members: frozenset[Graph] = field(repr=False)
    rank: int | None = None

    @property
    def name(self) -> str:
        return self.label.name

    @property
    def p(self) -> int:
        return self.label.p

    @property
    def size(self) -> int:
        return len(self.members)


class Basis:
    """Ordered list of categories covering the graphs of ``n`` replicas."""

    def __init__(self, n: int, categories: Sequence[Category]):
        self.n = n
        self.categories = list(categories)
        self._index: dict[Graph, int] = {}
        for idx, cat in enumerate(self.categories):
            for g in cat.members:
                if g in self._index:
                    raise ConsistencyError(f"{g!r} belongs to two categories")
                self._index[g] = idx

    def __len__(self) -> int:
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories)

    def index_of(self, g: Graph) -> int | None:
        return self._index.get(canonicalize(g))

    def category_of(self, g: Graph) -> Category:
        idx = self.index_of(g)
        if idx is None:
            raise ConsistencyError(f"{g!r} is not covered by the basis")
        return self.categories[idx]

    def names(self) -> list[str]:
        return [c.name for c in self.categories]

    def sizes(self) -> list[int]:
        return [c.size for c in self.categories]

    def covered(self) -> int:
        return len(self._index)

    def partition(self) -> frozenset[frozenset[Graph]]:
        return frozenset(c.members for c in self.categories)

    def reorder(self, names: Sequence[str]) -> "Basis":
        by_name = {c.name: c for c in self.categories}
        if sorted(names) != sorted(by_name):
            raise DomainError("reorder needs exactly the existing category names")
        return Basis(self.n, [by_name[x] for x in names])


# --- named constructions -------------------------------------------------------------

PermSet = Callable[[int, Sequence[tuple[int, int]]], Iterable[Perm]]


def _ident(n, pairs):
    return [Perm.identity(n)]


def _cls(ct):
    def build(n, pairs, barred=False):
        return class_members(n, ct)

    return build


def _cond(ct, *signatures):
    def build(n, pairs, barred=False):
        out = set()
        for sig in signatures:
            out |= conditioned_class(n, ct, pairs, sig, barred=barred)
        return out

    return build


def _build_members(n: int, p: int, terms) -> frozenset[Graph]:
    """Union over ordered pair lists of ``c(u_1..u_p) c[x (x) y]`` and its bar dual."""
    out = set()
    for tops in itertools.permutations(range(n), p):
        for bots in itertools.permutations(range(n), p):
            pairs = list(zip(tops, bots))
            for top_set, bot_set in terms:
                xs = top_set(n, pairs) if top_set is _ident else top_set(n, pairs, barred=False)
                ys = bot_set(n, pairs) if bot_set is _ident else bot_set(n, pairs, barred=True)
                for x in xs:
                    for y in ys:
                        out.add(canonicalize(Graph(n, pairs, x, y)))
    out |= {bar_swap(g) for g in out}
    return frozenset(out)


_X = _cls((2,))
_C3 = _cls((3,))

# (p, permutation class, signature, [(unbarred set, barred set), ...])
_NAMED = {
    1: [
        (0, "I", "", [(_ident, _ident)]),
        (1, "I", "", [(_ident, _ident)]),
    ],
    2: [
        (0, "I", "", [(_ident, _ident)]),
        (1, "I", "", [(_ident, _ident)]),
        (0, "X+Xb", "", [(_X, _ident)]),
        (1, "X+Xb", "", [(_X, _ident)]),
        (2, "I", "", [(_ident, _ident)]),
        (0, "XXb", "", [(_X, _X)]),
        (2, "X+Xb", "", [(_X, _ident)]),
        (1, "XXb", "", [(_X, _X)]),
    ],
    3: [
        (0, "I", "", [(_ident, _ident)]),
        (0, "X+Xb", "", [(_X, _ident)]),
        (0, "XXb", "", [(_X, _X)]),
        (0, "[XX]+[XbXb]", "", [(_C3, _ident)]),
        (0, "[XX]Xb+[XbXb]X", "", [(_C3, _X)]),
        (0, "[XX][XbXb]", "", [(_C3, _C3)]),
        (1, "I", "", [(_ident, _ident)]),
        (1, "X+Xb", "0", [(_cond((2,), "0"), _ident)]),
        (1, "X+Xb", "1", [(_cond((2,), "1"), _ident)]),
        (1, "XXb", "00", [(_cond((2,), "0"), _cond((2,), "0"))]),
        (1, "XXb", "01", [(_cond((2,), "0"), _cond((2,), "1"))]),
        (1, "XXb", "11", [(_cond((2,), "1"), _cond((2,), "1"))]),
        (1, "[XX]+[XbXb]", "", [(_C3, _ident)]),
        (1, "[XX]Xb+[XbXb]X", "0", [(_C3, _cond((2,), "0"))]),
        (1, "[XX]Xb+[XbXb]X", "1", [(_C3, _cond((2,), "1"))]),
        (1, "[XX][XbXb]", "", [(_C3, _C3)]),
        (2, "I", "", [(_ident, _ident)]),
        (2, "X+Xb", "01", [(_cond((2,), "01", "10"), _ident)]),
        (2, "X+Xb", "11", [(_cond((2,), "11"), _ident)]),
        (2, "XXb", "01,01", [(_cond((2,), "01"), _cond((2,), "01"))]),
        (2, "XXb", "01,10", [(_cond((2,), "01"), _cond((2,), "10"))]),
        (2, "XXb", "01,11", [(_cond((2,), "01", "10"), _cond((2,), "11"))]),
        (2, "[XX]Xb+[XbXb]X", "01", [(_C3, _cond((2,), "01", "10"))]),
        (3, "I", "", [(_ident, _ident)]),
        (3, "X+Xb", "", [(_X, _ident)]),
        (3, "[XX]+[XbXb]", "", [(_C3, _ident)]),
    ],
}


def named_categories(n: int) -> list[Category]:
    """Categories for ``n <= 3`` built from their defining permutation sets.

    The order is the standard one used for the compact matrices (for
    ``n = 3`` it follows the row order of the 26 x 26 ``M_J``).
    """
    if n not in _NAMED:
        raise DomainError(f"named categories exist only for n in {sorted(_NAMED)}")
    out = []
    for p, perm_class, sig, terms in _NAMED[n]:
        members = _build_members(n, p, terms)
        key = frozenset(orbit_key(g) for g in members)
        out.append(Category(Label(p, perm_class, sig, key), members))
    return out


def _named_lookup(n: int) -> dict[OrbitKey, Label]:
    if n not in _NAMED_CACHE:
        table = {}
        for c in named_categories(n):
            for k in c.label.key:
                table[k] = c.label
        _NAMED_CACHE[n] = table
    return _NAMED_CACHE[n]


_NAMED_CACHE: dict[int, dict[OrbitKey, Label]] = {}
_DISCOVERED: dict[int, "Discovery"] = {}


def _orbit_label(g: Graph) -> Label:
    perm_class, sig = _generic_label(g)
    return Label(g.p, perm_class, sig, frozenset({orbit_key(g)}))


def classify_graph(g: Graph) -> Label:
    """Label of the category containing ``g``.

    Graphs of one category get equal labels.  For ``n <= 3`` the label
    carries the permutation-class and condition text of the named
    construction; for ``n = 4`` it comes from the discovered basis (cached
    after the first call).  Fully unpaired and fully paired graphs are named
    by cycle types, the rest by their loop words.  Beyond ``n = 4`` the label
    describes the relabeling orbit of ``g`` only.
    """
    g = canonicalize(g)
    key = orbit_key(g)
    if g.n in _NAMED:
        label = _named_lookup(g.n).get(key)
        if label is None:
            raise ConsistencyError(f"{g!r} matches no named category")
        return label
    if g.n <= DISCOVERY_MAX_N:
        return cached_discovery(g.n).basis.category_of(g).label
    return _orbit_label(g)


def seed_categories(n: int) -> list[Category]:
    """``F_0 = c[I]``, ``F_1 = sum_u c_u c[I]`` and ``F_{0,X+Xb} = sum_e c[X_e] + sum_e c[X_ebar]``.

    Empty seeds (no exchanges when ``n = 1``) are dropped.
    """
    if n < 1:
        raise DomainError("need at least one replica")
    ident = Perm.identity(n)
    f0 = frozenset({Graph.identity(n)})
    f1 = frozenset(canonicalize(Graph(n, [(i, j)], ident, ident)) for i in range(n) for j in range(n))
    fx = set()
    for i in range(n):
        for j in range(i + 1, n):
            t = Perm.transposition(n, i, j)
            fx.add(Graph(n, (), t, ident))
            fx.add(Graph(n, (), ident, t))
    out = []
    for members in (f0, f1, frozenset(fx)):
        if members:
            rep = min(members)
            label = _named_lookup(n)[orbit_key(rep)] if n in _NAMED else _orbit_label(rep)
            out.append(Category(label, members, rank=1))
    return out


@dataclass
class Discovery:
    """Result of :func:`discover`: the basis plus per-rank bookkeeping."""

    basis: Basis
    ranks: list[list[str]]
    orbit_count: int

    def rank_sizes(self) -> list[int]:
        by_name = {c.name: c.size for c in self.basis}
        return [sum(by_name[x] for x in names) for names in self.ranks]


DISCOVERY_MAX_N = 4


def _reachable_orbits(n: int, seeds: Sequence[Category]):
    """Orbits reachable from the seeds and the per-graph coefficient between them.

    Returns ``(members, images, order)`` where ``images[k][k2]`` is the
    coefficient (in units of ``J/D``) with which every graph of orbit ``k2``
    appears in ``L`` applied to the orbit sum of ``k``.
    """
    from .liouvillian import generator_terms

    members: dict[OrbitKey, frozenset[Graph]] = {}
    order: list[OrbitKey] = []
    queue = []
    for cat in seeds:
        k = orbit_key(min(cat.members))
        if k not in members:
            members[k] = orbit(min(cat.members))
            order.append(k)
            queue.append(k)
    images: dict[OrbitKey, dict[OrbitKey, int]] = {}
    while queue:
        k = queue.pop(0)
        counts: dict[Graph, int] = defaultdict(int)
        for g in members[k]:
            for h, sign in generator_terms(g):
                counts[h] += sign
        hits: dict[OrbitKey, set] = defaultdict(set)
        for h, c in counts.items():
            if c:
                hits[orbit_key(h)].add((h, c))
        row = {}
        for k2, found in hits.items():
            if k2 not in members:
                members[k2] = orbit(next(iter(found))[0])
                order.append(k2)
                queue.append(k2)
            values = {c for _, c in found}
            if len(values) != 1 or len(found) != len(members[k2]):
                raise ConsistencyError("L is not uniform on a relabeling orbit")
            row[k2] = values.pop()
        images[k] = row
    return members, images, order


def _coarsest_lumping(order: Sequence[OrbitKey], images, fixed: OrbitKey) -> list[list[OrbitKey]]:
    """Coarsest union of orbits on which ``L`` acts uniformly.

    Starts from one block per pair count (with ``c[I]`` alone) and splits a
    block whenever two of its orbits receive different total coefficients
    from some block.  The result is stable: every block sum maps to a
    combination of block sums.
    """
    block = {k: (k[0], k == fixed) for k in order}
    while True:
        groups: dict = defaultdict(list)
        for k in order:
            groups[block[k]].append(k)
        blocks = sorted(groups.values(), key=lambda ks: order.index(ks[0]))
        signature = {}
        for k in order:
            vec = tuple(sum(images[s].get(k, 0) for s in src) for src in blocks)
            signature[k] = (block[k], vec)
        if len(set(signature.values())) == len(blocks):
            return blocks
        block = signature


def discover(n: int, seed_order: Sequence[int] | None = None, max_rank: int = 64) -> Discovery:
    """Categories generated from the seeds by repeated application of ``L``.

    Relabeling orbits reachable from the seeds are collected first.  Orbits
    are a valid but sometimes too fine split, so they are merged into the
    coarsest unions on which ``L`` still acts uniformly.  Ranks then follow
    by breadth-first search: rank 1 holds the seeds, rank ``r + 1`` the
    categories first produced by ``L`` from rank ``r``.
    """
    if n > DISCOVERY_MAX_N:
        raise DomainError(f"discovery is capped at n <= {DISCOVERY_MAX_N}")
    seeds = seed_categories(n)
    if seed_order is not None:
        seeds = [seeds[i] for i in seed_order]
    members, images, order = _reachable_orbits(n, seeds)
    blocks = _coarsest_lumping(order, images, orbit_key(Graph.identity(n)))
    block_of = {k: b for b, ks in enumerate(blocks) for k in ks}
    block_images = [{block_of[k2] for k in ks for k2 in images[k]} for ks in blocks]

    rank_of: dict[int, int] = {}
    frontier = []
    for cat in seeds:
        b = block_of[orbit_key(min(cat.members))]
        if b not in rank_of:
            rank_of[b] = 1
            frontier.append(b)
    rank = 1
    ordered = list(frontier)
    while frontier:
        rank += 1
        if rank > max_rank:
            raise ConsistencyError(f"no closure after {max_rank} ranks")
        new = []
        for b in frontier:
            for b2 in sorted(block_images[b]):
                if b2 not in rank_of:
                    rank_of[b2] = rank
                    new.append(b2)
        ordered.extend(new)
        frontier = new

    named = _named_lookup(n) if n in _NAMED else None
    cats = []
    for b in ordered:
        ks = blocks[b]
        mem = frozenset().union(*(members[k] for k in ks))
        if named is not None:
            label = named[ks[0]]
        else:
            labels = [_orbit_label(min(members[k])) for k in ks]
            sig = "|".join(x.signature for x in labels if x.signature)
            label = Label(labels[0].p, labels[0].perm_class, sig, frozenset(ks))
        cats.append(Category(label, mem, rank=rank_of[b]))
    ranks = [[c.name for c in cats if c.rank == r] for r in range(1, rank)]
    ranks = [r for r in ranks if r]
    return Discovery(Basis(n, cats), ranks, len(order))


def cached_discovery(n: int) -> Discovery:
    """:func:`discover` with default arguments, computed once per ``n``."""
    if n not in _DISCOVERED:
        _DISCOVERED[n] = discover(n)
    return _DISCOVERED[n]


def standard_basis(n: int) -> Basis:
    """Named basis in its pinned order for ``n <= 3``; discovery order otherwise."""
    if n in _NAMED:
        return Basis(n, named_categories(n))
    return cached_discovery(n).basis


def orbit_partition(n: int) -> dict[OrbitKey, list[Graph]]:
    """All graphs of ``n`` replicas grouped by :func:`orbit_key`."""
    groups: dict[OrbitKey, list[Graph]] = defaultdict(list)
    for g in enumerate_graphs(n):
        groups[orbit_key(g)].append(g)
    return dict(groups)


def label_counts(n: int, p: int) -> Counter:
    """Member count per label among the graphs with ``p`` pairs."""
    return Counter(classify_graph(g) for g in enumerate_graphs(n, p))
