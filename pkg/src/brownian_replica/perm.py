"""Exact symmetric-group arithmetic on replica labels.

Permutations are stored in zero-based one-line notation: ``p[i]`` is the image
of ``i``.  Text forms (``str``, :meth:`Perm.one_line`) are one-based, which is
how contour labels are written everywhere outside Python code.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Iterable, Sequence

from .errors import DomainError, SizeError


class Perm(tuple):
    """A bijection of ``range(n)`` in one-line notation.

    Composition follows function composition: ``(p * q)(i) == p(q(i))``.
    """

    __slots__ = ()

    def __new__(cls, images: Iterable[int] = ()):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise DomainError(f"not a permutation of range({len(images)}): {images}")
        return super().__new__(cls, images)

    @classmethod
    def _trusted(cls, images: tuple[int, ...]) -> "Perm":
        return tuple.__new__(cls, images)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls._trusted(tuple(range(n)))

    @classmethod
    def from_one_line(cls, images: Sequence[int]) -> "Perm":
        """Build from one-based images, e.g. ``[2, 1, 3]`` for the swap of 1 and 2."""
        return cls(x - 1 for x in images)

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Perm":
        """Build from zero-based cycles: ``from_cycles(3, (0, 1, 2))`` maps 0->1->2->0."""
        images = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            if seen.intersection(cyc):
                raise DomainError(f"cycles overlap: {cycles}")
            seen.update(cyc)
            for k, x in enumerate(cyc):
                images[x] = cyc[(k + 1) % len(cyc)]
        return cls(images)

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Perm":
        if i == j:
            raise DomainError("a transposition needs two distinct points")
        return cls.from_cycles(n, (i, j))

    @property
    def n(self) -> int:
        return len(self)

    def __call__(self, i: int) -> int:
        return self[i]

    def __mul__(self, other: "Perm") -> "Perm":  # type: ignore[override]
        return compose(self, other)

    def __rmul__(self, other):  # tuple defines int * tuple; keep it out
        return NotImplemented

    def inverse(self) -> "Perm":
        inv = [0] * len(self)
        for i, x in enumerate(self):
            inv[x] = i
        return Perm._trusted(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest element."""
        out = []
        seen = [False] * len(self)
        for start in range(len(self)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self[x]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def support(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self) if i != x)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def one_line(self) -> list[int]:
        return [x + 1 for x in self]

    def __repr__(self) -> str:
        return f"Perm({self.one_line()})"

    def __str__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "I"
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles)


def compose(p: Perm, q: Perm) -> Perm:
    """Return ``p o q``, i.e. apply ``q`` first."""
    if len(p) != len(q):
        raise SizeError(f"cannot compose permutations of sizes {len(p)} and {len(q)}")
    return Perm._trusted(tuple(p[x] for x in q))


def all_perms(n: int) -> list[Perm]:
    return [Perm._trusted(p) for p in itertools.permutations(range(n))]


def _check_cycle_type(n: int, ct: Sequence[int]) -> tuple[int, ...]:
    ct = tuple(int(x) for x in ct)
    if any(x < 2 for x in ct) or sum(ct) > n:
        raise DomainError(f"{list(ct)} is not a cycle type of S_{n} (parts must be >1, sum <= n)")
    return tuple(sorted(ct, reverse=True))


def class_size(n: int, ct: Sequence[int]) -> int:
    """Size of the conjugacy class with cycle type ``ct`` (fixed points implicit)."""
    ct = _check_cycle_type(n, ct)
    parts = list(ct) + [1] * (n - sum(ct))
    denom = 1
    for length, mult in Counter(parts).items():
        denom *= length**mult * math.factorial(mult)
    return math.factorial(n) // denom


def class_members(n: int, ct: Sequence[int]) -> frozenset[Perm]:
    """The conjugacy class of S_n whose non-trivial cycles have lengths ``ct``."""
    ct = _check_cycle_type(n, ct)
    return frozenset(p for p in all_perms(n) if p.cycle_type() == ct)


def cycle_types(n: int) -> list[tuple[int, ...]]:
    """All restricted partitions of ``n`` (parts > 1), identity first."""

    def parts(rest: int, largest: int) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = [()]
        for k in range(min(rest, largest), 1, -1):
            out.extend((k,) + tail for tail in parts(rest - k, k))
        return out

    return sorted(parts(n, n), key=lambda ct: (sum(ct), ct))


def conditioned_class(
    n: int,
    ct: Sequence[int],
    pairs: Sequence[tuple[int, int]],
    signature: str,
    barred: bool = False,
) -> frozenset[Perm]:
    """Members of a conjugacy class selected by which connected pairs they touch.

    ``pairs`` are ``(a, b)`` contour pairs (``a`` unbarred, ``b`` barred).  A
    permutation on the unbarred side touches pair ``j`` when its support
    contains ``a_j``; on the barred side when it contains ``b_j``.
    ``signature[j] == "0"`` demands no contact, ``"1"`` demands contact.
    """
    if len(signature) != len(pairs) or set(signature) - {"0", "1"}:
        raise DomainError(f"signature {signature!r} does not match {len(pairs)} pairs")
    if len({a for a, _ in pairs}) != len(pairs) or len({b for _, b in pairs}) != len(pairs):
        raise DomainError(f"pairs must have distinct endpoints: {pairs}")
    side = 1 if barred else 0
    out = set()
    for p in class_members(n, ct):
        supp = p.support()
        if all((pair[side] in supp) == (bit == "1") for pair, bit in zip(pairs, signature)):
            out.add(p)
    return frozenset(out)


def conditioned_two_cycles(
    n: int, pairs: Sequence[tuple[int, int]], signature: str, barred: bool = False
) -> frozenset[Perm]:
    """Transpositions filtered by contact with each connected pair (see :func:`conditioned_class`)."""
    return conditioned_class(n, (2,), pairs, signature, barred=barred)


def product_counts(left: Iterable[Perm], right: Iterable[Perm]) -> Counter:
    """Multiset product ``{p o q}`` with multiplicities, as ``Counter[Perm]``."""
    right = list(right)
    return Counter(compose(p, q) for p in left for q in right)
