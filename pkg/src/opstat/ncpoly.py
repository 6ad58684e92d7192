"""Noncommutative polynomials over the integers.

A polynomial is an immutable map from words (tuples of indeterminate ids)
to nonzero Python integers.  The empty word is the multiplicative unit.
Monomial orders live in :mod:`opstat.membership`; nothing here depends on one.

:func:`translate_term` maps arithmetic ground terms to polynomials: zero
constants go to 0 and every other constant (identities included) to its own
indeterminate.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union

from opstat import logic as L

Word = tuple[int, ...]

EMPTY: Word = ()


class NCPoly:
    """Element of Z<X>, stored as ``{word: coefficient}`` without zero entries."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, int] | Iterable[tuple[Word, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, int] = {}
        for word, coeff in items:
            if coeff:
                word = tuple(word)
                acc[word] = acc.get(word, 0) + coeff
        self._terms = {w: c for w, c in acc.items() if c}
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[Word, int]) -> NCPoly:
        # trusted constructor: caller guarantees no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def word(cls, word: Iterable[int], coeff: int = 1) -> NCPoly:
        return cls._raw({tuple(word): coeff} if coeff else {})

    @classmethod
    def var(cls, ident: int) -> NCPoly:
        return cls._raw({(ident,): 1})

    @classmethod
    def const(cls, value: int) -> NCPoly:
        return cls._raw({EMPTY: value} if value else {})

    @classmethod
    def zero(cls) -> NCPoly:
        return cls._raw({})

    @property
    def terms(self) -> Mapping[Word, int]:
        return self._terms

    def items(self):
        return self._terms.items()

    def words(self) -> Iterator[Word]:
        return iter(self._terms)

    def coeff(self, word: Word) -> int:
        return self._terms.get(word, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def letters(self) -> set[int]:
        return {x for w in self._terms for x in w}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NCPoly):
            return self._terms == other._terms
        if isinstance(other, int):
            return self._terms == ({EMPTY: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> NCPoly:
        return NCPoly._raw({w: -c for w, c in self._terms.items()})

    def __add__(self, other: NCPoly | int) -> NCPoly:
        if isinstance(other, int):
            other = NCPoly.const(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out.get(w, 0) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other: NCPoly | int) -> NCPoly:
        if isinstance(other, int):
            other = NCPoly.const(other)
        return self + (-other)

    def __rsub__(self, other: int) -> NCPoly:
        return NCPoly.const(other) - self

    def __mul__(self, other: NCPoly | int) -> NCPoly:
        if isinstance(other, int):
            return self.scale(other)
        out: dict[Word, int] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                s = out.get(w, 0) + c1 * c2
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return NCPoly._raw(out)

    def __rmul__(self, other: int) -> NCPoly:
        return self.scale(other)

    def scale(self, k: int) -> NCPoly:
        if not k:
            return NCPoly.zero()
        return NCPoly._raw({w: k * c for w, c in self._terms.items()})

    def lrmul(self, left: Word, right: Word, k: int = 1) -> NCPoly:
        """Return ``k * left * self * right`` for words ``left`` and ``right``."""
        if not k:
            return NCPoly.zero()
        return NCPoly._raw({left + w + right: k * c for w, c in self._terms.items()})

    def __repr__(self) -> str:
        return f"NCPoly({self.render()})"

    def render(self, names: Mapping[int, str] | None = None) -> str:
        """Render as text, e.g. ``x*iu - x``; terms by decreasing (length, ids)."""
        return render_terms(self._terms, names)


def _word_text(word: Word, names: Mapping[int, str] | None) -> str:
    if not word:
        return "1"
    if names is None:
        return "*".join(f"x{i}" for i in word)
    return "*".join(names[i] for i in word)


def render_word(word: Word, names: Mapping[int, str] | None = None) -> str:
    return _word_text(word, names)


def render_terms(terms: Mapping[Word, int], names: Mapping[int, str] | None = None) -> str:
    if not terms:
        return "0"
    parts: list[str] = []
    for word in sorted(terms, key=lambda w: (len(w), w), reverse=True):
        c = terms[word]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not word:
            body = str(a)
        elif a == 1:
            body = _word_text(word, names)
        else:
            body = f"{a}*{_word_text(word, names)}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class PolySyntaxError(ValueError):
    pass


def parse_word(text: str, ids: Mapping[str, int]) -> Word:
    """Parse ``a*b*c`` (or ``1`` for the empty word)."""
    text = text.strip()
    if text == "1":
        return EMPTY
    out = []
    for part in text.split("*"):
        part = part.strip()
        if part not in ids:
            raise PolySyntaxError(f"unknown indeterminate {part!r}")
        out.append(ids[part])
    return tuple(out)


def parse_poly(text: str, ids: Mapping[str, int]) -> NCPoly:
    """Parse the rendering produced by :func:`render_terms`.

    Accepts sums of signed terms ``[k*]name*name...``; a bare integer is a
    multiple of the empty word.
    """
    tokens: list[tuple[str, str]] = []
    for m in _TOKEN.finditer(text):
        num, name, other = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        elif other is not None and not other.isspace():
            tokens.append(("op", other))
    pos = 0
    terms: list[tuple[Word, int]] = []

    def peek() -> tuple[str, str] | None:
        return tokens[pos] if pos < len(tokens) else None

    sign = 1
    expect_term = True
    while pos < len(tokens):
        kind, val = tokens[pos]
        if kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            pos += 1
            expect_term = True
            continue
        if not expect_term:
            raise PolySyntaxError(f"unexpected token {val!r} in {text!r}")
        coeff = 1
        word: list[int] = []
        first = True
        while True:
            tok = peek()
            if tok is None:
                raise PolySyntaxError(f"truncated polynomial {text!r}")
            kind, val = tok
            if kind == "num":
                if not first:
                    raise PolySyntaxError(f"coefficient inside a word in {text!r}")
                coeff = int(val)
            elif kind == "name":
                if val not in ids:
                    raise PolySyntaxError(f"unknown indeterminate {val!r}")
                word.append(ids[val])
            else:
                raise PolySyntaxError(f"unexpected token {val!r} in {text!r}")
            pos += 1
            first = False
            tok = peek()
            if tok == ("op", "*"):
                pos += 1
                continue
            break
        terms.append((tuple(word), sign * coeff))
        sign = 1
        expect_term = False
    if expect_term and terms:
        raise PolySyntaxError(f"dangling operator in {text!r}")
    if text.strip() == "0":
        return NCPoly.zero()
    return NCPoly(terms)


@dataclass
class IndeterminateTable:
    """Bijection between nonzero constant names and indeterminate ids.

    Ids are handed out in first-appearance order.
    """

    ids: dict[str, int] = field(default_factory=dict)
    names: dict[int, str] = field(default_factory=dict)

    def get(self, name: str) -> int:
        ident = self.ids.get(name)
        if ident is None:
            ident = len(self.ids)
            self.ids[name] = ident
            self.names[ident] = name
        return ident

    def __contains__(self, name: str) -> bool:
        return name in self.ids

    def __len__(self) -> int:
        return len(self.ids)

    def order(self) -> list[int]:
        return sorted(self.names)

    def copy(self) -> IndeterminateTable:
        return IndeterminateTable(dict(self.ids), dict(self.names))


class NonArithmeticSymbol(ValueError):
    pass


class NotGround(ValueError):
    pass


def translate_term(t: L.Term, tbl: IndeterminateTable) -> NCPoly:
    if isinstance(t, L.Const):
        if t.is_zero:
            return NCPoly.zero()
        return NCPoly.var(tbl.get(t.name))
    if isinstance(t, L.Var):
        raise NotGround(f"variable {t.name} in translated term")
    if isinstance(t, L.App):
        name = t.fn.name
        if name == "+":
            return translate_term(t.args[0], tbl) + translate_term(t.args[1], tbl)
        if name == "-":
            return -translate_term(t.args[0], tbl)
        if name == "*":
            return translate_term(t.args[0], tbl) * translate_term(t.args[1], tbl)
        raise NonArithmeticSymbol(f"function {name!r} has no polynomial translation")
    raise TypeError(f"not a term: {t!r}")


def translate_literal(lhs: L.Term, rhs: L.Term, tbl: IndeterminateTable) -> NCPoly:
    """The polynomial ``T(lhs) - T(rhs)``."""
    return translate_term(lhs, tbl) - translate_term(rhs, tbl)


@dataclass(frozen=True)
class PolyEq:
    poly: NCPoly


@dataclass(frozen=True)
class PolyNode:
    """Connective over translated subformulas: 'not', 'and', 'or' or 'implies'."""

    op: str
    children: tuple[Union[PolyEq, PolyNode], ...]


def translate(phi: L.Formula, tbl: IndeterminateTable) -> PolyEq | PolyNode:
    """Translate an arithmetic ground sentence, keeping its connective shape."""
    if isinstance(phi, L.Eq):
        return PolyEq(translate_literal(phi.lhs, phi.rhs, tbl))
    if isinstance(phi, L.Not):
        return PolyNode("not", (translate(phi.body, tbl),))
    for cls, op in ((L.And, "and"), (L.Or, "or"), (L.Implies, "implies")):
        if isinstance(phi, cls):
            return PolyNode(op, (translate(phi.left, tbl), translate(phi.right, tbl)))
    raise NotGround("quantified formula cannot be translated")
