"""Herbrand normal form and fair enumeration of ground instances."""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from opstat.logic import (
    App,
    Const,
    Exists,
    Forall,
    Formula,
    FunctionSort,
    FunctionSymbol,
    LogicError,
    Signature,
    Sort,
    SortMismatch,
    Term,
    Var,
    comp_symbol,
    is_ground_term,
    neg_symbol,
    plus_symbol,
    split_prefix,
    substitute,
    to_prenex,
    universal_closure,
    zero,
)


class EmptySortUniverse(LogicError):
    pass


class HintError(LogicError):
    pass


@dataclass(frozen=True)
class Introduced:
    """A symbol added by Herbrandisation and the universal variable it replaced."""

    name: str
    replaced: Var
    kind: str  # "constant" or "function"
    depends_on: tuple[Var, ...] = ()

    def term(self, sig: Signature) -> Term:
        if self.kind == "constant":
            return Const(self.name, self.replaced.sort)
        fn = FunctionSymbol(self.name, FunctionSort(tuple(v.sort for v in self.depends_on), self.replaced.sort))
        return App(fn, self.depends_on)


@dataclass
class HerbrandResult:
    sentence: Formula
    extended_signature: Signature
    introduced: list[Introduced] = field(default_factory=list)

    @property
    def existentials(self) -> list[Var]:
        return [v for _, v in split_prefix(self.sentence)[0]]

    @property
    def matrix(self) -> Formula:
        return split_prefix(self.sentence)[1]

    def is_ground(self) -> bool:
        return not self.existentials


def herbrandise(sig: Signature, f: Formula) -> HerbrandResult:
    """Close, prenex, then replace universals by fresh constants/functions."""
    prefix, matrix = split_prefix(to_prenex(universal_closure(f)))
    ext = sig
    introduced: list[Introduced] = []
    existentials: list[Var] = []
    bindings: dict[Var, Term] = {}
    for q, v in prefix:
        if q is Exists:
            existentials.append(v)
            continue
        name, ext = ext.fresh(v.name.rstrip("'"))
        if not existentials:
            ext = ext.with_constant(name, v.sort, internal=True)
            bindings[v] = Const(name, v.sort)
            introduced.append(Introduced(name, v, "constant"))
        else:
            fs = FunctionSort(tuple(x.sort for x in existentials), v.sort)
            ext = ext.with_function(name, fs, internal=True)
            bindings[v] = App(FunctionSymbol(name, fs), tuple(existentials))
            introduced.append(Introduced(name, v, "function", tuple(existentials)))
    if bindings:
        matrix = substitute(matrix, bindings)
    sentence = matrix
    for v in reversed(existentials):
        sentence = Exists(v, sentence)
    return HerbrandResult(sentence, ext, introduced)


# -- ground terms ------------------------------------------------------------


class GroundTerms:
    """Ground terms per sort ordered by size, then by symbol rank.

    Symbol rank: user constants in declaration order, then the zero
    constant, then user functions in declaration order, then ``+``, ``-``,
    ``*``.  Streams are generated lazily and cached.
    """

    def __init__(self, sig: Signature):
        self.sig = sig
        self._by_size: dict[tuple[Sort, int], list[Term]] = {}
        self._flat: dict[Sort, list[Term]] = {}
        self._next_size: dict[Sort, int] = {}
        self._funcs = [s for s in sig.user_symbols()]

    def _producers(self, s: Sort) -> list[FunctionSymbol]:
        out = [f for f in self._funcs if f.sort.result == s]
        out.append(plus_symbol(s))
        out.append(neg_symbol(s))
        for w in self.sig.objects:
            out.append(comp_symbol(s.source, s.target, w))
        return out

    def of_size(self, s: Sort, k: int) -> list[Term]:
        key = (s, k)
        hit = self._by_size.get(key)
        if hit is not None:
            return hit
        out: list[Term] = []
        if k == 1:
            out.extend(Const(n, cs) for n, cs in self.sig.constants.items() if cs == s)
            out.append(zero(s))
        else:
            for fn in self._producers(s):
                n = fn.arity
                for sizes in _compositions(k - 1, n):
                    pools = [self.of_size(a, m) for a, m in zip(fn.sort.args, sizes)]
                    for args in itertools.product(*pools):
                        out.append(App(fn, args))
        self._by_size[key] = out
        return out

    def get(self, s: Sort, index: int) -> Term:
        flat = self._flat.setdefault(s, [])
        while len(flat) <= index:
            k = self._next_size.get(s, 1)
            batch = self.of_size(s, k)
            self._next_size[s] = k + 1
            flat.extend(batch)
            if k > 64 and not flat:
                raise EmptySortUniverse(f"no ground terms of sort {s}")
        return flat[index]

    def first(self, s: Sort) -> Term:
        return self.get(s, 0)

    def stream(self, s: Sort) -> Iterator[Term]:
        for i in itertools.count():
            yield self.get(s, i)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered ways to write ``total`` as ``parts`` positive integers, lexicographic."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _weak_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class GroundInstance:
    sentence: Formula
    bindings: Mapping[Var, Term]
    from_hint: bool = False


class GroundEnumerator:
    """Stream of ground instances of a Herbrand normal form, hints first."""

    def __init__(self, sig: Signature, h: Formula, hints: Sequence[Mapping[Var, Term]] = ()):
        self.signature = sig
        self.prefix = [v for _, v in split_prefix(h)[0]]
        if any(q is Forall for q, _ in split_prefix(h)[0]):
            raise LogicError("expansion needs a purely existential prefix")
        self.matrix = split_prefix(h)[1]
        self.terms = GroundTerms(sig)
        self.hints = [self._complete_hint(hm) for hm in hints]
        for v in self.prefix:
            self.terms.first(v.sort)  # surfaces EmptySortUniverse early

    def _complete_hint(self, hint: Mapping[Var, Term]) -> dict[Var, Term]:
        out: dict[Var, Term] = {}
        for v, t in hint.items():
            if v not in self.prefix:
                raise HintError(f"hint binds {v.name}, which is not existentially quantified")
            if t.sort != v.sort:
                raise SortMismatch(f"hint {v.name} : {v.sort} bound to term of sort {t.sort}")
            if not is_ground_term(t):
                raise HintError(f"hint for {v.name} is not ground")
        for v in self.prefix:
            out[v] = hint[v] if v in hint else self.terms.first(v.sort)
        return out

    def __iter__(self) -> Iterator[GroundInstance]:
        if not self.prefix:
            yield GroundInstance(self.matrix, {})
            return
        for hint in self.hints:
            yield GroundInstance(substitute(self.matrix, hint), dict(hint), True)
        n = len(self.prefix)
        for total in itertools.count():
            for idx in _weak_compositions(total, n):
                b = {v: self.terms.get(v.sort, i) for v, i in zip(self.prefix, idx)}
                yield GroundInstance(substitute(self.matrix, b), b)


def expansion(sig: Signature, h: Formula, hints: Sequence[Mapping[Var, Term]] = ()) -> GroundEnumerator:
    return GroundEnumerator(sig, h, hints)
