"""Many-sorted first-order logic with equality over morphism sorts.

A sort ``Sort(u, v)`` is a morphism from object ``u`` to object ``v``.
Composition ``s * t`` applies ``t`` first, so with ``t : u -> w`` and
``s : w -> v`` the product has sort ``u -> v``.

Terms and formulas are immutable and hash-consed lazily (hashes cached).
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

RESERVED_PREFIX = "_"
ARITH = ("+", "-", "*")
ZERO = "0"


class LogicError(ValueError):
    pass


class UnknownSymbol(LogicError):
    pass


class SortMismatch(LogicError):
    pass


class UnassignedAtom(LogicError):
    pass


class ReservedName(LogicError):
    pass


@dataclass(frozen=True, order=True)
class Sort:
    source: str
    target: str

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class FunctionSort:
    args: tuple[Sort, ...]
    result: Sort

    def __post_init__(self):
        if len(self.args) < 1:
            raise LogicError("function sorts need at least one argument")

    def __str__(self) -> str:
        args = " x ".join(f"({a.source},{a.target})" for a in self.args)
        return f"{args} -> ({self.result.source},{self.result.target})"


@dataclass(frozen=True)
class FunctionSymbol:
    """A function symbol; overloads of one name are distinct symbols."""

    name: str
    sort: FunctionSort

    @property
    def arithmetic(self) -> bool:
        return self.name in ARITH

    @property
    def arity(self) -> int:
        return len(self.sort.args)

    def __str__(self) -> str:
        return f"{self.name} : {self.sort}"


def plus_symbol(s: Sort) -> FunctionSymbol:
    return FunctionSymbol("+", FunctionSort((s, s), s))


def neg_symbol(s: Sort) -> FunctionSymbol:
    return FunctionSymbol("-", FunctionSort((s,), s))


def comp_symbol(u: str, v: str, w: str) -> FunctionSymbol:
    """Composition (w,v) x (u,w) -> (u,v)."""
    return FunctionSymbol("*", FunctionSort((Sort(w, v), Sort(u, w)), Sort(u, v)))


# -- terms -------------------------------------------------------------------


class Term:
    __slots__ = ()
    sort: Sort

    def size(self) -> int:
        raise NotImplementedError

    def __str__(self) -> str:
        return render_term(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({render_term(self)!r})"


class Var(Term):
    __slots__ = ("name", "sort", "_h")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self._h = hash(("V", name, sort))

    def __eq__(self, other):
        return self is other or (
            type(other) is Var and self._h == other._h and self.name == other.name and self.sort == other.sort
        )

    def __hash__(self):
        return self._h

    def size(self) -> int:
        return 1


class Const(Term):
    __slots__ = ("name", "sort", "_h")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self._h = hash(("C", name, sort))

    def __eq__(self, other):
        return self is other or (
            type(other) is Const and self._h == other._h and self.name == other.name and self.sort == other.sort
        )

    def __hash__(self):
        return self._h

    @property
    def is_zero(self) -> bool:
        return self.name == ZERO

    def size(self) -> int:
        return 1


class App(Term):
    __slots__ = ("fn", "args", "sort", "_h", "_size")

    def __init__(self, fn: FunctionSymbol, args: Sequence[Term]):
        self.fn = fn
        self.args = tuple(args)
        if len(self.args) != fn.arity:
            raise SortMismatch(f"{fn.name} expects {fn.arity} arguments, got {len(self.args)}")
        self.sort = fn.sort.result
        self._h = hash(("A", fn, self.args))
        self._size = 1 + sum(a.size() for a in self.args)

    def __eq__(self, other):
        return self is other or (
            type(other) is App and self._h == other._h and self.fn == other.fn and self.args == other.args
        )

    def __hash__(self):
        return self._h

    def size(self) -> int:
        return self._size


def zero(sort: Sort) -> Const:
    return Const(ZERO, sort)


def add(s: Term, t: Term) -> App:
    if s.sort != t.sort:
        raise SortMismatch(f"cannot add {render_term(s)} : {s.sort} and {render_term(t)} : {t.sort}")
    return App(plus_symbol(s.sort), (s, t))


def neg(s: Term) -> App:
    return App(neg_symbol(s.sort), (s,))


def sub(s: Term, t: Term) -> App:
    return add(s, neg(t))


def compose(s: Term, t: Term) -> App:
    """``s * t``: apply ``t`` then ``s``."""
    if s.sort.source != t.sort.target:
        raise SortMismatch(
            f"cannot compose {render_term(s)} : {s.sort} after {render_term(t)} : {t.sort}"
        )
    return App(comp_symbol(t.sort.source, s.sort.target, t.sort.target), (s, t))


def compose_all(terms: Sequence[Term]) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = compose(out, t)
    return out


def subterms(t: Term) -> Iterator[Term]:
    """Post-order, left to right."""
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    yield t


def term_vars(t: Term) -> set[Var]:
    return {s for s in subterms(t) if isinstance(s, Var)}


def is_ground_term(t: Term) -> bool:
    return not any(isinstance(s, Var) for s in subterms(t))


def term_key(t: Term) -> tuple:
    """Total order on terms: size first, then symbols in pre-order."""
    return (t.size(), _preorder(t))


def _preorder(t: Term) -> tuple:
    if isinstance(t, App):
        head = (2, t.fn.name, t.sort.source, t.sort.target)
        return (head,) + tuple(itertools.chain.from_iterable(_preorder(a) for a in t.args))
    kind = 0 if isinstance(t, Var) else 1
    return ((kind, t.name, t.sort.source, t.sort.target),)


def map_term(t: Term, fn: Callable[[Term], Term | None]) -> Term:
    """Rebuild ``t`` bottom-up; ``fn`` may replace any rebuilt node."""
    if isinstance(t, App):
        args = tuple(map_term(a, fn) for a in t.args)
        if args != t.args:
            t = App(t.fn, args)
    r = fn(t)
    return t if r is None else r


# -- formulas ----------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({render_formula(self)!r})"


def _fhash(obj) -> int:
    return obj._h


class Eq(Formula):
    __slots__ = ("lhs", "rhs", "_h")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = lhs
        self.rhs = rhs
        self._h = hash(("Eq", lhs, rhs))

    def __eq__(self, o):
        return self is o or (type(o) is Eq and self._h == o._h and self.lhs == o.lhs and self.rhs == o.rhs)

    __hash__ = _fhash


class Not(Formula):
    __slots__ = ("body", "_h")

    def __init__(self, body: Formula):
        self.body = body
        self._h = hash(("Not", body))

    def __eq__(self, o):
        return self is o or (type(o) is Not and self._h == o._h and self.body == o.body)

    __hash__ = _fhash


class _Binary(Formula):
    __slots__ = ("left", "right", "_h")

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._h = hash((type(self).__name__, left, right))

    def __eq__(self, o):
        return self is o or (
            type(o) is type(self) and self._h == o._h and self.left == o.left and self.right == o.right
        )

    __hash__ = _fhash


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Implies(_Binary):
    __slots__ = ()


class _Quant(Formula):
    __slots__ = ("var", "body", "_h")

    def __init__(self, var: Var, body: Formula):
        self.var = var
        self.body = body
        self._h = hash((type(self).__name__, var, body))

    def __eq__(self, o):
        return self is o or (
            type(o) is type(self) and self._h == o._h and self.var == o.var and self.body == o.body
        )

    __hash__ = _fhash


class Forall(_Quant):
    __slots__ = ()


class Exists(_Quant):
    __slots__ = ()


Literal = tuple[Term, Term]


def conj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise LogicError("empty conjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise LogicError("empty disjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


def atoms(f: Formula) -> list[Eq]:
    """Distinct equations in left-to-right order."""
    seen: dict[Eq, None] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Eq):
            seen.setdefault(g, None)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, _Binary):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, _Quant):
            walk(g.body)

    walk(f)
    return list(seen)


def formula_terms(f: Formula) -> Iterator[Term]:
    for a in atoms(f):
        yield a.lhs
        yield a.rhs


def map_terms(f: Formula, fn: Callable[[Term], Term]) -> Formula:
    """Apply ``fn`` to both sides of every equation (quantifiers untouched)."""
    if isinstance(f, Eq):
        lhs, rhs = fn(f.lhs), fn(f.rhs)
        return f if (lhs is f.lhs and rhs is f.rhs) else Eq(lhs, rhs)
    if isinstance(f, Not):
        return Not(map_terms(f.body, fn))
    if isinstance(f, _Binary):
        return type(f)(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, _Quant):
        return type(f)(f.var, map_terms(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> list[Var]:
    """Free variables in order of first occurrence."""
    out: dict[Var, None] = {}

    def walk(g: Formula, bound: frozenset[Var]) -> None:
        if isinstance(g, Eq):
            for t in (g.lhs, g.rhs):
                for s in subterms(t):
                    if isinstance(s, Var) and s not in bound:
                        out.setdefault(s, None)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, _Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, _Quant):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return list(out)


def all_vars(f: Formula) -> set[Var]:
    out: set[Var] = set()
    for t in formula_terms(f):
        out |= term_vars(t)

    def walk(g: Formula) -> None:
        if isinstance(g, _Quant):
            out.add(g.var)
            walk(g.body)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, _Binary):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Eq):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, _Binary):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def is_ground(f: Formula) -> bool:
    return is_quantifier_free(f) and all(is_ground_term(t) for t in formula_terms(f))


def function_symbols(f: Formula) -> list[FunctionSymbol]:
    """Function symbols in innermost-first, left-to-right order of occurrence."""
    out: dict[FunctionSymbol, None] = {}
    for t in formula_terms(f):
        for s in subterms(t):
            if isinstance(s, App):
                out.setdefault(s.fn, None)
    return list(out)


def constants(f: Formula) -> list[Const]:
    out: dict[Const, None] = {}
    for t in formula_terms(f):
        for s in subterms(t):
            if isinstance(s, Const):
                out.setdefault(s, None)
    return list(out)


# -- signature ---------------------------------------------------------------


class Signature:
    """Symbol table.  Extension methods return new signatures."""

    def __init__(
        self,
        objects: Iterable[str] = (),
        constants: Mapping[str, Sort] | None = None,
        functions: Mapping[str, Sequence[FunctionSort]] | None = None,
        variables: Mapping[str, Sort] | None = None,
        counter: int = 0,
    ):
        self.objects: tuple[str, ...] = tuple(dict.fromkeys(objects))
        self.constants: dict[str, Sort] = dict(constants or {})
        self.functions: dict[str, tuple[FunctionSort, ...]] = {
            k: tuple(v) for k, v in (functions or {}).items()
        }
        self.variables: dict[str, Sort] = dict(variables or {})
        self.counter = counter
        self._validate()

    def _validate(self) -> None:
        seen: dict[str, str] = {}
        for kind, names in (
            ("object", self.objects),
            ("constant", self.constants),
            ("function", self.functions),
            ("variable", self.variables),
        ):
            for n in names:
                if n in seen:
                    raise LogicError(f"{n!r} declared as both {seen[n]} and {kind}")
                if n in ARITH or n == ZERO:
                    raise LogicError(f"{n!r} is reserved for arithmetic")
                seen[n] = kind
        for n, s in itertools.chain(self.constants.items(), self.variables.items()):
            self._check_sort(s, n)
        for n, fss in self.functions.items():
            if len(set(fss)) != len(fss):
                raise LogicError(f"duplicate overload for {n!r}")
            for fs in fss:
                for s in (*fs.args, fs.result):
                    self._check_sort(s, n)

    def _check_sort(self, s: Sort, where: str) -> None:
        for o in (s.source, s.target):
            if o not in self.objects:
                raise UnknownSymbol(f"object {o!r} (in declaration of {where!r}) is not declared")

    def _replace(self, **kw) -> Signature:
        args = dict(
            objects=self.objects,
            constants=self.constants,
            functions=self.functions,
            variables=self.variables,
            counter=self.counter,
        )
        args.update(kw)
        return Signature(**args)

    @staticmethod
    def _user_name(name: str, internal: bool) -> None:
        if not internal and name.startswith(RESERVED_PREFIX):
            raise ReservedName(f"names starting with {RESERVED_PREFIX!r} are reserved: {name!r}")

    def with_objects(self, *names: str, internal: bool = False) -> Signature:
        for n in names:
            self._user_name(n, internal)
        return self._replace(objects=self.objects + tuple(n for n in names if n not in self.objects))

    def with_constant(self, name: str, sort: Sort, internal: bool = False) -> Signature:
        self._user_name(name, internal)
        if name in self.constants:
            raise LogicError(f"constant {name!r} already declared")
        return self._replace(constants={**self.constants, name: sort})

    def with_function(self, name: str, fsort: FunctionSort, internal: bool = False) -> Signature:
        self._user_name(name, internal)
        return self._replace(functions={**self.functions, name: self.functions.get(name, ()) + (fsort,)})

    def with_variable(self, name: str, sort: Sort, internal: bool = False) -> Signature:
        self._user_name(name, internal)
        if name in self.variables:
            if self.variables[name] == sort:
                return self
            raise LogicError(f"variable {name!r} already declared with sort {self.variables[name]}")
        return self._replace(variables={**self.variables, name: sort})

    def fresh(self, base: str) -> tuple[str, Signature]:
        """Collision-free reserved name and the signature with the counter bumped."""
        counter = self.counter
        while True:
            counter += 1
            name = f"{RESERVED_PREFIX}{base}{counter}"
            if not self.declared(name):
                return name, self._replace(counter=counter)

    def declared(self, name: str) -> bool:
        return (
            name in self.objects
            or name in self.constants
            or name in self.functions
            or name in self.variables
        )

    def sorts(self) -> list[Sort]:
        return [Sort(u, v) for u in self.objects for v in self.objects]

    def const(self, name: str) -> Const:
        if name not in self.constants:
            raise UnknownSymbol(f"unknown constant {name!r}")
        return Const(name, self.constants[name])

    def var(self, name: str) -> Var:
        if name not in self.variables:
            raise UnknownSymbol(f"unknown variable {name!r}")
        return Var(name, self.variables[name])

    def function(self, name: str, arg_sorts: Sequence[Sort] | None = None) -> FunctionSymbol:
        """Resolve an overload by argument sorts (or the unique overload)."""
        fss = self.functions.get(name)
        if not fss:
            raise UnknownSymbol(f"unknown function {name!r}")
        if arg_sorts is None:
            if len(fss) != 1:
                raise SortMismatch(f"function {name!r} is overloaded; argument sorts needed")
            return FunctionSymbol(name, fss[0])
        for fs in fss:
            if fs.args == tuple(arg_sorts):
                return FunctionSymbol(name, fs)
        shown = ", ".join(str(s) for s in arg_sorts)
        raise SortMismatch(f"no overload of {name!r} accepts ({shown})")

    def user_symbols(self) -> list[FunctionSymbol]:
        return [FunctionSymbol(n, fs) for n, fss in self.functions.items() for fs in fss]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and (
            self.objects == other.objects
            and self.constants == other.constants
            and self.functions == other.functions
            and self.variables == other.variables
        )

    def __repr__(self) -> str:
        return (
            f"Signature(objects={list(self.objects)}, constants={len(self.constants)}, "
            f"functions={len(self.functions)}, variables={len(self.variables)})"
        )


def check_term(sig: Signature, t: Term) -> Sort:
    if isinstance(t, Var):
        declared = sig.variables.get(t.name)
        if declared is None:
            raise UnknownSymbol(f"unknown variable {t.name!r}")
        if declared != t.sort:
            raise SortMismatch(f"variable {t.name} has sort {declared}, used as {t.sort}")
        return t.sort
    if isinstance(t, Const):
        if t.is_zero:
            sig._check_sort(t.sort, ZERO)
            return t.sort
        declared = sig.constants.get(t.name)
        if declared is None:
            raise UnknownSymbol(f"unknown constant {t.name!r}")
        if declared != t.sort:
            raise SortMismatch(f"constant {t.name} has sort {declared}, used as {t.sort}")
        return t.sort
    if isinstance(t, App):
        fn = t.fn
        if fn.arithmetic:
            expected = _arith_shape(fn)
            if expected is None:
                raise SortMismatch(f"malformed arithmetic symbol {fn}")
        elif fn.sort not in sig.functions.get(fn.name, ()):
            if fn.name in sig.functions:
                raise SortMismatch(f"no overload {fn} declared")
            raise UnknownSymbol(f"unknown function {fn.name!r}")
        for s in (*fn.sort.args, fn.sort.result):
            sig._check_sort(s, fn.name)
        for a, expected_sort in zip(t.args, fn.sort.args):
            actual = check_term(sig, a)
            if actual != expected_sort:
                raise SortMismatch(
                    f"argument {render_term(a)} of {fn.name} has sort {actual}, expected {expected_sort}"
                )
        return fn.sort.result
    raise TypeError(f"not a term: {t!r}")


def _arith_shape(fn: FunctionSymbol) -> FunctionSymbol | None:
    args, res = fn.sort.args, fn.sort.result
    if fn.name == "+" and len(args) == 2 and args[0] == args[1] == res:
        return fn
    if fn.name == "-" and len(args) == 1 and args[0] == res:
        return fn
    if fn.name == "*" and len(args) == 2:
        s, t = args
        if s.source == t.target and res == Sort(t.source, s.target):
            return fn
    return None


def check_sorts(sig: Signature, f: Formula) -> bool:
    """Raise UnknownSymbol/SortMismatch unless ``f`` is well-sorted under ``sig``."""
    if isinstance(f, Eq):
        ls, rs = check_term(sig, f.lhs), check_term(sig, f.rhs)
        if ls != rs:
            raise SortMismatch(
                f"equation {render_term(f.lhs)} = {render_term(f.rhs)} relates sorts {ls} and {rs}"
            )
    elif isinstance(f, Not):
        check_sorts(sig, f.body)
    elif isinstance(f, _Binary):
        check_sorts(sig, f.left)
        check_sorts(sig, f.right)
    elif isinstance(f, _Quant):
        check_term(sig, f.var)
        check_sorts(sig, f.body)
    else:
        raise TypeError(f"not a formula: {f!r}")
    return True


# -- substitution and prenex form --------------------------------------------


def substitute_term(t: Term, bindings: Mapping[Var, Term]) -> Term:
    if not bindings:
        return t
    return map_term(t, lambda s: bindings.get(s) if isinstance(s, Var) else None)


def _prime(v: Var, avoid: set[str]) -> Var:
    name = v.name + "'"
    while name in avoid:
        name += "'"
    return Var(name, v.sort)


def substitute(f: Formula, bindings: Mapping[Var, Term] | Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of free variables."""
    b: dict[Var, Term] = {}
    for k, t in bindings.items():
        if isinstance(k, str):
            raise TypeError("bind variables by Var, not by name")
        if k.sort != t.sort:
            raise SortMismatch(f"cannot bind {k.name} : {k.sort} to {render_term(t)} : {t.sort}")
        b[k] = t
    return _subst(f, b)


def _subst(f: Formula, b: dict[Var, Term]) -> Formula:
    if not b:
        return f
    if isinstance(f, Eq):
        return Eq(substitute_term(f.lhs, b), substitute_term(f.rhs, b))
    if isinstance(f, Not):
        return Not(_subst(f.body, b))
    if isinstance(f, _Binary):
        return type(f)(_subst(f.left, b), _subst(f.right, b))
    if isinstance(f, _Quant):
        inner = {k: t for k, t in b.items() if k != f.var}
        fv_body = set(free_vars(f.body))
        inner = {k: t for k, t in inner.items() if k in fv_body}
        if not inner:
            return f
        incoming = set().union(*(term_vars(t) for t in inner.values()))
        if f.var in incoming:
            avoid = {v.name for v in incoming | all_vars(f.body)} | {k.name for k in inner}
            fresh = _prime(f.var, avoid)
            body = _subst(f.body, {f.var: fresh})
            return type(f)(fresh, _subst(body, inner))
        return type(f)(f.var, _subst(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def to_prenex(f: Formula) -> Formula:
    """Equivalent formula with all quantifiers in front; left operands first."""
    prefix, matrix = _prenex(f, set(v.name for v in all_vars(f)))
    for q, v in reversed(prefix):
        matrix = q(v, matrix)
    return matrix


_DUAL = {Forall: Exists, Exists: Forall}


def _prenex(f: Formula, used: set[str]) -> tuple[list[tuple[type, Var]], Formula]:
    if isinstance(f, Eq):
        return [], f
    if isinstance(f, Not):
        pre, m = _prenex(f.body, used)
        return [(_DUAL[q], v) for q, v in pre], Not(m)
    if isinstance(f, _Quant):
        pre, m = _prenex(f.body, used)
        return [(type(f), f.var)] + pre, m
    if isinstance(f, _Binary):
        lp, lm = _prenex(f.left, used)
        rp, rm = _prenex(f.right, used)
        # rename bound variables of one side that clash with the other side
        lp, lm = _freshen(lp, lm, set(free_vars(rm)) | {v for _, v in rp}, used)
        rp, rm = _freshen(rp, rm, set(free_vars(lm)) | {v for _, v in lp}, used)
        if isinstance(f, Implies):
            lp = [(_DUAL[q], v) for q, v in lp]
        return lp + rp, type(f)(lm, rm)
    raise TypeError(f"not a formula: {f!r}")


def _freshen(prefix, matrix, clash: set[Var], used: set[str]):
    out = []
    for q, v in prefix:
        if v in clash:
            nv = _prime(v, used)
            used.add(nv.name)
            matrix = _subst(matrix, {v: nv})
            v = nv
        out.append((q, v))
    return out, matrix


def split_prefix(f: Formula) -> tuple[list[tuple[type, Var]], Formula]:
    prefix = []
    while isinstance(f, _Quant):
        prefix.append((type(f), f.var))
        f = f.body
    return prefix, f


def universal_closure(f: Formula) -> Formula:
    for v in reversed(free_vars(f)):
        f = Forall(v, f)
    return f


# -- clauses and CNF ---------------------------------------------------------


def literal_key(lit: Literal) -> tuple:
    return (term_key(lit[0]), term_key(lit[1]))


@dataclass(frozen=True)
class Clause:
    """``s1 != t1 | ... | sn != tn | p1 = q1 | ... | pm = qm``."""

    negatives: tuple[Literal, ...]
    positives: tuple[Literal, ...]

    @classmethod
    def make(cls, negatives: Iterable[Literal], positives: Iterable[Literal]) -> Clause:
        neg = tuple(sorted(dict.fromkeys(negatives), key=literal_key))
        pos = tuple(sorted(dict.fromkeys(positives), key=literal_key))
        return cls(neg, pos)

    def __or__(self, other: Clause) -> Clause:
        return Clause.make(self.negatives + other.negatives, self.positives + other.positives)

    def is_tautology(self) -> bool:
        return bool(set(self.negatives) & set(self.positives))

    def to_formula(self) -> Formula:
        lits: list[Formula] = [Not(Eq(s, t)) for s, t in self.negatives]
        lits += [Eq(p, q) for p, q in self.positives]
        return disj(lits)

    def __len__(self) -> int:
        return len(self.negatives) + len(self.positives)

    def __str__(self) -> str:
        parts = [f"{render_term(s)} != {render_term(t)}" for s, t in self.negatives]
        parts += [f"{render_term(p)} = {render_term(q)}" for p, q in self.positives]
        return " | ".join(parts)


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form of a quantifier-free formula (no implications)."""
    if isinstance(f, Eq):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return nnf(f.body, not positive)
    if isinstance(f, Implies):
        if positive:
            return Or(nnf(f.left, False), nnf(f.right, True))
        return And(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, And):
        c = And if positive else Or
        return c(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Or):
        c = Or if positive else And
        return c(nnf(f.left, positive), nnf(f.right, positive))
    raise LogicError("CNF needs a quantifier-free formula")


def to_cnf(f: Formula) -> list[Clause]:
    """Clauses of the conjunctive normal form, in generation order, deduplicated."""
    raw = _cnf(nnf(f))
    out: dict[Clause, None] = {}
    for neg_lits, pos_lits in raw:
        out.setdefault(Clause.make(neg_lits, pos_lits), None)
    return list(out)


def _cnf(f: Formula) -> list[tuple[tuple[Literal, ...], tuple[Literal, ...]]]:
    if isinstance(f, Eq):
        return [((), ((f.lhs, f.rhs),))]
    if isinstance(f, Not):
        e = f.body
        return [(((e.lhs, e.rhs),), ())]
    if isinstance(f, And):
        return _cnf(f.left) + _cnf(f.right)
    if isinstance(f, Or):
        left, right = _cnf(f.left), _cnf(f.right)
        return [(ln + rn, lp + rp) for ln, lp in left for rn, rp in right]
    raise LogicError(f"unexpected node in NNF: {f!r}")


def cnf_size(f: Formula, positive: bool = True) -> int:
    """Number of clauses ``to_cnf`` generates before deduplication."""
    if isinstance(f, Eq):
        return 1
    if isinstance(f, Not):
        return cnf_size(f.body, not positive)
    if isinstance(f, Implies):
        a, b = cnf_size(f.left, not positive), cnf_size(f.right, positive)
        return a * b if positive else a + b
    if isinstance(f, (And, Or)):
        a, b = cnf_size(f.left, positive), cnf_size(f.right, positive)
        return a + b if isinstance(f, And) == positive else a * b
    raise LogicError("quantifier-free formula expected")


def eval_propositional(f: Formula, valuation: Mapping[Eq, bool]) -> bool:
    if isinstance(f, Eq):
        try:
            return bool(valuation[f])
        except KeyError:
            raise UnassignedAtom(f"no truth value for {render_formula(f)}") from None
    if isinstance(f, Not):
        return not eval_propositional(f.body, valuation)
    if isinstance(f, And):
        return eval_propositional(f.left, valuation) and eval_propositional(f.right, valuation)
    if isinstance(f, Or):
        return eval_propositional(f.left, valuation) or eval_propositional(f.right, valuation)
    if isinstance(f, Implies):
        return (not eval_propositional(f.left, valuation)) or eval_propositional(f.right, valuation)
    raise LogicError("propositional evaluation needs a quantifier-free formula")


def eval_clauses(clauses: Iterable[Clause], valuation: Mapping[Eq, bool]) -> bool:
    for c in clauses:
        if not (
            any(not valuation[Eq(s, t)] for s, t in c.negatives)
            or any(valuation[Eq(p, q)] for p, q in c.positives)
        ):
            return False
    return True


# -- rendering ---------------------------------------------------------------

# binding strength: atoms 4, product 3, unary minus 2, sum 1
def render_term(t: Term, annotate_zero: bool = False) -> str:
    return _render(t, annotate_zero)[0]


def _render(t: Term, az: bool) -> tuple[str, int]:
    if isinstance(t, Var):
        return t.name, 4
    if isinstance(t, Const):
        if t.is_zero:
            return (f"0[{t.sort.source},{t.sort.target}]" if az else "0"), 4
        return t.name, 4
    fn = t.fn
    if fn.name == "*":
        (ls, lp), (rs, rp) = _render(t.args[0], az), _render(t.args[1], az)
        if lp < 3:
            ls = f"({ls})"
        if rp <= 3:
            rs = f"({rs})" if rp < 4 else rs
        return f"{ls}*{rs}", 3
    if fn.name == "-":
        s, p = _render(t.args[0], az)
        if p < 3:
            s = f"({s})"
        return f"-{s}", 2
    if fn.name == "+":
        (ls, lp), right = _render(t.args[0], az), t.args[1]
        if isinstance(right, App) and right.fn.name == "-":
            rs, rp = _render(right.args[0], az)
            if rp < 2:
                rs = f"({rs})"
            return f"{ls} - {rs}", 1
        rs, rp = _render(right, az)
        if rp <= 1:
            rs = f"({rs})"
        return f"{ls} + {rs}", 1
    args = ", ".join(_render(a, az)[0] for a in t.args)
    return f"{fn.name}({args})", 4


# formula binding: atom/not 5, & 4, | 3, -> 2, quantifier 1
def render_formula(f: Formula, annotate_zero: bool = False, sorts: bool = False) -> str:
    return _rf(f, annotate_zero, sorts)[0]


def _rf(f: Formula, az: bool, sorts: bool) -> tuple[str, int]:
    if isinstance(f, Eq):
        return f"{render_term(f.lhs, az)} = {render_term(f.rhs, az)}", 5
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"{render_term(f.body.lhs, az)} != {render_term(f.body.rhs, az)}", 5
        s, p = _rf(f.body, az, sorts)
        return (f"!{s}" if p >= 5 else f"!({s})"), 5
    if isinstance(f, _Binary):
        op, prec = {And: ("&", 4), Or: ("|", 3), Implies: ("->", 2)}[type(f)]
        ls, lp = _rf(f.left, az, sorts)
        rs, rp = _rf(f.right, az, sorts)
        if isinstance(f, Implies):
            # right associative
            if lp <= prec:
                ls = f"({ls})"
            if rp < prec:
                rs = f"({rs})"
        else:
            if lp < prec:
                ls = f"({ls})"
            if rp <= prec:
                rs = f"({rs})"
        return f"{ls} {op} {rs}", prec
    if isinstance(f, _Quant):
        q = "forall" if isinstance(f, Forall) else "exists"
        names = [f.var]
        body = f.body
        while type(body) is type(f):
            names.append(body.var)
            body = body.body
        binder = ", ".join(f"{v.name} : {v.sort}" if sorts else v.name for v in names)
        return f"{q} {binder} . {_rf(body, az, sorts)[0]}", 1
    raise TypeError(f"not a formula: {f!r}")


AnyNode = Union[Term, Formula]
