"""Exact Laurent-polynomial coefficients in the symbols ``w``, ``J`` and ``D``."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

_SYMBOLS = ("w", "J", "D")


class Coeff:
    """Immutable map from monomials ``w^a J^b D^c`` to rational coefficients.

    Only the handful of operations the generator algebra needs are provided:
    addition, multiplication, rational scaling, evaluation and a stable text
    form such as ``"w + 2*J"`` or ``"-3*J/D"``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int, int], Fraction | int] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = c
        object.__setattr__(self, "_terms", clean)

    @classmethod
    def const(cls, c) -> "Coeff":
        return cls({(0, 0, 0): c})

    @classmethod
    def symbol(cls, name: str) -> "Coeff":
        mono = [0, 0, 0]
        mono[_SYMBOLS.index(name)] = 1
        return cls({tuple(mono): 1})

    @classmethod
    def j_over_d(cls, c=1) -> "Coeff":
        return cls({(0, 1, -1): c})

    @property
    def terms(self) -> dict[tuple[int, int, int], Fraction]:
        return dict(self._terms)

    def __setattr__(self, key, value):
        raise AttributeError("Coeff is immutable")

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coeff.const(other)
        if not isinstance(other, Coeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coeff.const(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return Coeff(out)

    __radd__ = __add__

    def __neg__(self):
        return Coeff({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Coeff({m: c * other for m, c in self._terms.items()})
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, 0) + c1 * c2
        return Coeff(out)

    __rmul__ = __mul__

    def coefficient(self, w: int = 0, J: int = 0, D: int = 0) -> Fraction:
        return self._terms.get((w, J, D), Fraction(0))

    def evaluate(self, w=0.0, J=1.0, D=None):
        """Numeric value; ``D`` is required whenever it appears."""
        total = 0
        for (a, b, c), k in self._terms.items():
            if c and D is None:
                raise ValueError(f"{self} depends on D")
            term = k * (w**a if a else 1) * (J**b if b else 1) * (D**c if c else 1)
            total = total + term
        return total

    def to_sympy(self):
        import sympy

        w, J, D = sympy.symbols("w J D")
        return sum(
            (sympy.Rational(k.numerator, k.denominator) * w**a * J**b * D**c for (a, b, c), k in self._terms.items()),
            sympy.Integer(0),
        )

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        # w first, then J, then J/D, then everything else
        for mono in sorted(self._terms, key=lambda m: (-m[0], -m[1], -m[2])):
            c = self._terms[mono]
            num = []
            den = []
            for sym, e in zip(_SYMBOLS, mono):
                if e > 0:
                    num.append(sym if e == 1 else f"{sym}^{e}")
                elif e < 0:
                    den.append(sym if e == -1 else f"{sym}^{-e}")
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = "*".join(num)
            if mag.denominator != 1:
                den.insert(0, str(mag.denominator))
            if mag.numerator != 1 or not body:
                body = f"{mag.numerator}*{body}" if body else str(mag.numerator)
            if den:
                body += "/" + "/".join(den) if len(den) == 1 else "/(" + "*".join(den) + ")"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Coeff({str(self)!r})"


W = Coeff.symbol("w")
J = Coeff.symbol("J")
D = Coeff.symbol("D")
ONE = Coeff.const(1)
ZERO = Coeff()
