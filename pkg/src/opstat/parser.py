"""Problem files.

::

    # comments run to the end of the line
    obj u, v;
    const iu : u -> u;
    fun star : (u,v) -> (v,u);
    fun star : (v,u) -> (u,v);
    var x : u -> v;
    rule star(star(t)) -> t;
    extend star;
    option max_rounds = 3;
    assume forall x . x*iu = x;
    claim exists y . y = x;
    hint y = x;

Statements end with ``;``.  ``claim`` appears exactly once.  The problem
formula is ``(assume_1 & ... & assume_n) -> claim`` with free variables
universally closed.  Formulas use ``forall``/``exists`` binders (``forall
x : u -> v, y . body``), ``->`` (right associative), ``|``, ``&``, ``!``,
``=`` and ``!=``.  Terms use ``*`` (composition, ``s*t`` applies ``t``
first), ``+``, binary and unary ``-``, ``f(args)`` and ``0``; the sort of
``0`` is inferred, or written ``0[u,v]`` when the context leaves it open.
Binding strength, tightest first: ``*``, unary ``-``, ``+``, comparisons,
``!``, ``&``, ``|``, ``->``.

In ``rule`` statements every identifier that is not a declared constant
is a pattern variable, and function names match every overload.
"""

from __future__ import annotations

import re
from collections.abc import Iterator
from dataclasses import dataclass, field

from opstat import logic as L
from opstat.prover import PApp, PConst, Pattern, PVar, RewriteRule, render_pattern

KEYWORDS = {"obj", "const", "fun", "var", "rule", "assume", "claim", "hint", "extend", "option", "forall", "exists"}


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


class UnknownName(ParseError, L.UnknownSymbol):
    """Reference to an undeclared object, constant or function."""


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "num", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>(?:\#|//)[^\n]*)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)"
    r"|(?P<op>->|!=|[=!&|(),;:.+\-*\[\]])"
)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind in ("id", "num", "op"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


# -- surface syntax trees ------------------------------------------------------


@dataclass(frozen=True)
class SName:
    name: str
    tok: Token


@dataclass(frozen=True)
class SZero:
    tok: Token
    sort: L.Sort | None = None


@dataclass(frozen=True)
class SApp:
    name: str
    args: tuple
    tok: Token


STerm = SName | SZero | SApp


@dataclass(frozen=True)
class SEq:
    lhs: STerm
    rhs: STerm
    negated: bool


@dataclass(frozen=True)
class SNot:
    body: object


@dataclass(frozen=True)
class SBin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class SQuant:
    kind: str
    var: str
    sort: L.Sort | None
    body: object
    tok: Token


# -- problem -------------------------------------------------------------------


@dataclass
class ProblemFile:
    objects: list[str] = field(default_factory=list)
    constants: dict[str, L.Sort] = field(default_factory=dict)
    functions: dict[str, list[L.FunctionSort]] = field(default_factory=dict)
    variables: dict[str, L.Sort] = field(default_factory=dict)
    rules: list[RewriteRule] = field(default_factory=list)
    assumptions: list[L.Formula] = field(default_factory=list)
    claim: L.Formula | None = None
    hints: list[dict[str, L.Term]] = field(default_factory=list)
    extend: list[str] = field(default_factory=list)
    options: dict[str, str] = field(default_factory=dict)

    def signature(self) -> L.Signature:
        return L.Signature(self.objects, self.constants, self.functions, self.variables)

    def formula(self) -> L.Formula:
        if self.claim is None:
            raise ParseError("problem has no claim")
        f = self.claim
        if self.assumptions:
            f = L.Implies(L.conj(self.assumptions), f)
        return L.universal_closure(f)

    def render(self) -> str:
        lines: list[str] = []
        if self.objects:
            lines.append(f"obj {', '.join(self.objects)};")
        for n, s in self.constants.items():
            lines.append(f"const {n} : {s};")
        for n, fss in self.functions.items():
            for fs in fss:
                lines.append(f"fun {n} : {fs};")
        for n, s in self.variables.items():
            lines.append(f"var {n} : {s};")
        for r in self.rules:
            lines.append(f"rule {r};")
        if self.extend:
            lines.append(f"extend {', '.join(self.extend)};")
        for k, v in self.options.items():
            lines.append(f"option {k} = {v};")
        for a in self.assumptions:
            lines.append(f"assume {L.render_formula(a, annotate_zero=True)};")
        if self.claim is not None:
            lines.append(f"claim {L.render_formula(self.claim, annotate_zero=True)};")
        for h in self.hints:
            body = ", ".join(f"{k} = {L.render_term(t, annotate_zero=True)}" for k, t in h.items())
            lines.append(f"hint {body};")
        return "\n".join(lines) + "\n"


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "id") and self.tok.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS:
            raise self.error(f"expected an identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    # sorts
    def sort(self) -> L.Sort:
        u = self.ident().text
        self.eat("->")
        v = self.ident().text
        return L.Sort(u, v)

    def paren_sort(self) -> L.Sort:
        self.eat("(")
        u = self.ident().text
        self.eat(",")
        v = self.ident().text
        self.eat(")")
        return L.Sort(u, v)

    def fsort(self) -> L.FunctionSort:
        args = [self.paren_sort()]
        while self.at("x"):
            self.eat("x")
            args.append(self.paren_sort())
        self.eat("->")
        return L.FunctionSort(tuple(args), self.paren_sort())

    # terms (precedence climbing)
    def term(self) -> STerm:
        left = self.unary()
        while self.at("+") or self.at("-"):
            op = self.tok
            self.i += 1
            right = self.unary()
            if op.text == "-":
                right = SApp("-", (right,), op)
            left = SApp("+", (left, right), op)
        return left

    def unary(self) -> STerm:
        if self.at("-"):
            op = self.eat("-")
            return SApp("-", (self.unary(),), op)
        return self.product()

    def product(self) -> STerm:
        left = self.primary()
        while self.at("*"):
            op = self.eat("*")
            left = SApp("*", (left, self.primary()), op)
        return left

    def primary(self) -> STerm:
        t = self.tok
        if self.at("("):
            self.eat("(")
            inner = self.term()
            self.eat(")")
            return inner
        if t.kind == "num":
            if t.text != "0":
                raise self.error("only the literal 0 is a term")
            self.i += 1
            if self.at("["):
                self.eat("[")
                u = self.ident().text
                self.eat(",")
                v = self.ident().text
                self.eat("]")
                return SZero(t, L.Sort(u, v))
            return SZero(t)
        name = self.ident()
        if self.at("("):
            self.eat("(")
            args = [self.term()]
            while self.at(","):
                self.eat(",")
                args.append(self.term())
            self.eat(")")
            return SApp(name.text, tuple(args), name)
        return SName(name.text, name)

    # formulas
    def formula(self):
        left = self.disjunction()
        if self.at("->"):
            self.eat("->")
            return SBin("->", left, self.formula())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            self.eat("|")
            left = SBin("|", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.negation()
        while self.at("&"):
            self.eat("&")
            left = SBin("&", left, self.negation())
        return left

    def negation(self):
        if self.at("!") :
            self.eat("!")
            return SNot(self.negation())
        if self.at("forall") or self.at("exists"):
            return self.quantified()
        if self.at("("):
            save = self.i
            try:
                self.eat("(")
                inner = self.formula()
                self.eat(")")
                if not (self.at("=") or self.at("!=") or self.at("*") or self.at("+") or self.at("-")):
                    return inner
            except ParseError:
                pass
            self.i = save
        return self.equation()

    def quantified(self):
        kind_tok = self.tok
        kind = kind_tok.text
        self.i += 1
        binders: list[tuple[str, L.Sort | None, Token]] = []
        while True:
            name = self.ident()
            sort = None
            if self.at(":"):
                self.eat(":")
                sort = self.sort()
            binders.append((name.text, sort, name))
            if self.at(","):
                self.eat(",")
                continue
            break
        self.eat(".")
        body = self.formula()
        for name, sort, tok in reversed(binders):
            body = SQuant(kind, name, sort, body, tok)
        return body

    def equation(self):
        lhs = self.term()
        if self.at("="):
            self.eat("=")
            return SEq(lhs, self.term(), False)
        if self.at("!="):
            self.eat("!=")
            return SEq(lhs, self.term(), True)
        raise self.error("expected '=' or '!='")


# -- elaboration -----------------------------------------------------------------


class _Slots:
    """Union-find over object slots; a root may be bound to an object."""

    def __init__(self):
        self.parent: list[int] = []
        self.value: list[str | None] = []

    def new(self, obj: str | None = None) -> int:
        self.parent.append(len(self.parent))
        self.value.append(obj)
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def unify(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        va, vb = self.value[ra], self.value[rb]
        if va is not None and vb is not None and va != vb:
            return False
        self.parent[rb] = ra
        if va is None:
            self.value[ra] = vb
        return True

    def get(self, a: int) -> str | None:
        return self.value[self.find(a)]


class _Elaborator:
    """Infers sorts for one equation (or hint) and builds logic terms."""

    def __init__(self, sig: L.Signature, scope: dict[str, L.Sort]):
        self.sig = sig
        self.scope = scope
        self.slots = _Slots()
        self.nodes: dict[int, tuple[int, int]] = {}  # id(node) -> (src slot, tgt slot)
        self.pending: list[SApp] = []
        self.keep: list = []

    def fixed(self, s: L.Sort) -> tuple[int, int]:
        return self.slots.new(s.source), self.slots.new(s.target)

    def unify_sort(self, a: tuple[int, int], b: tuple[int, int], tok: Token, what: str) -> None:
        if not (self.slots.unify(a[0], b[0]) and self.slots.unify(a[1], b[1])):
            raise ParseError(f"sort mismatch in {what}", tok.line, tok.col)

    def visit(self, t) -> tuple[int, int]:
        self.keep.append(t)
        if isinstance(t, SZero):
            s = self.fixed(t.sort) if t.sort else (self.slots.new(), self.slots.new())
            if t.sort is not None:
                for o in (t.sort.source, t.sort.target):
                    if o not in self.sig.objects:
                        raise UnknownName(f"unknown object {o!r}", t.tok.line, t.tok.col)
        elif isinstance(t, SName):
            if t.name in self.scope:
                s = self.fixed(self.scope[t.name])
            elif t.name in self.sig.constants:
                s = self.fixed(self.sig.constants[t.name])
            else:
                raise UnknownName(f"unknown symbol {t.name!r}", t.tok.line, t.tok.col)
        else:
            args = [self.visit(a) for a in t.args]
            if t.name == "+":
                self.unify_sort(args[0], args[1], t.tok, "sum")
                s = args[0]
            elif t.name == "-":
                s = args[0]
            elif t.name == "*":
                # s*t : apply t then s; s.src == t.tgt
                if not self.slots.unify(args[0][0], args[1][1]):
                    raise ParseError("sort mismatch in product", t.tok.line, t.tok.col)
                s = (args[1][0], args[0][1])
            else:
                fss = self.sig.functions.get(t.name)
                if not fss:
                    raise UnknownName(f"unknown function {t.name!r}", t.tok.line, t.tok.col)
                arities = {len(fs.args) for fs in fss}
                if len(t.args) not in arities:
                    raise ParseError(f"wrong number of arguments for {t.name!r}", t.tok.line, t.tok.col)
                s = (self.slots.new(), self.slots.new())
                cands = [fs for fs in fss if len(fs.args) == len(t.args)]
                if len(cands) == 1:
                    self._apply_overload(t, cands[0], args, s)
                else:
                    self.pending.append(t)
        self.nodes[id(t)] = s
        return s

    def _apply_overload(self, t: SApp, fs: L.FunctionSort, args, s) -> None:
        for a, want in zip(args, fs.args):
            self.unify_sort(a, self.fixed(want), t.tok, f"argument of {t.name}")
        self.unify_sort(s, self.fixed(fs.result), t.tok, f"result of {t.name}")

    def _compatible(self, slot_pair, want: L.Sort) -> bool:
        a, b = self.slots.get(slot_pair[0]), self.slots.get(slot_pair[1])
        return (a is None or a == want.source) and (b is None or b == want.target)

    def resolve(self) -> None:
        while self.pending:
            progress = False
            for t in list(self.pending):
                args = [self.nodes[id(a)] for a in t.args]
                res = self.nodes[id(t)]
                fits = [
                    fs
                    for fs in self.sig.functions[t.name]
                    if len(fs.args) == len(t.args)
                    and all(self._compatible(a, w) for a, w in zip(args, fs.args))
                    and self._compatible(res, fs.result)
                ]
                if not fits:
                    raise ParseError(f"no overload of {t.name!r} fits here", t.tok.line, t.tok.col)
                if len(fits) == 1:
                    self._apply_overload(t, fits[0], args, res)
                    self.pending.remove(t)
                    progress = True
            if not progress:
                t = self.pending[0]
                raise ParseError(f"cannot resolve overload of {t.name!r}; annotate a zero", t.tok.line, t.tok.col)

    def sort_of(self, t) -> L.Sort:
        a, b = self.nodes[id(t)]
        u, v = self.slots.get(a), self.slots.get(b)
        if len(self.sig.objects) == 1:
            # with a single object every open slot is determined
            (only,) = self.sig.objects
            u, v = u or only, v or only
        if u is None or v is None:
            tok = getattr(t, "tok", None)
            raise ParseError(
                "cannot infer the sort of 0; write 0[u,v]", tok.line if tok else 0, tok.col if tok else 0
            )
        return L.Sort(u, v)

    def build(self, t) -> L.Term:
        s = self.sort_of(t)
        if isinstance(t, SZero):
            return L.zero(s)
        if isinstance(t, SName):
            if t.name in self.scope:
                return L.Var(t.name, s)
            return L.Const(t.name, s)
        args = tuple(self.build(a) for a in t.args)
        if t.name == "+":
            return L.add(*args)
        if t.name == "-":
            return L.neg(args[0])
        if t.name == "*":
            return L.compose(*args)
        return L.App(self.sig.function(t.name, [a.sort for a in args]), args)


def _check_name(name: str, tok: Token) -> None:
    if name.startswith(L.RESERVED_PREFIX):
        raise ParseError(f"names starting with {L.RESERVED_PREFIX!r} are reserved", tok.line, tok.col)


def parse_problem(text: str) -> ProblemFile:
    p = _Parser(text)
    pf = ProblemFile()
    raw_formulas: list[tuple[str, object, Token]] = []
    raw_hints: list[list[tuple[Token, STerm]]] = []
    raw_rules: list[tuple[STerm, STerm, Token]] = []
    while p.tok.kind != "eof":
        kw = p.tok
        if kw.kind != "id" or kw.text not in KEYWORDS - {"forall", "exists"}:
            raise p.error(f"expected a statement, found {kw.text!r}")
        p.i += 1
        if kw.text == "obj":
            names = [p.ident()]
            while p.at(","):
                p.eat(",")
                names.append(p.ident())
            for n in names:
                _check_name(n.text, n)
                if n.text in pf.objects:
                    raise ParseError(f"object {n.text!r} declared twice", n.line, n.col)
                pf.objects.append(n.text)
        elif kw.text in ("const", "var"):
            names = [p.ident()]
            while p.at(","):
                p.eat(",")
                names.append(p.ident())
            p.eat(":")
            stok = p.tok
            s = p.sort()
            for o in (s.source, s.target):
                if o not in pf.objects:
                    raise UnknownName(f"unknown object {o!r}", stok.line, stok.col)
            target = pf.constants if kw.text == "const" else pf.variables
            for n in names:
                _check_name(n.text, n)
                if n.text in target:
                    raise ParseError(f"{kw.text} {n.text!r} declared twice", n.line, n.col)
                target[n.text] = s
        elif kw.text == "fun":
            n = p.ident()
            _check_name(n.text, n)
            p.eat(":")
            stok = p.tok
            fs = p.fsort()
            for s in (*fs.args, fs.result):
                for o in (s.source, s.target):
                    if o not in pf.objects:
                        raise UnknownName(f"unknown object {o!r}", stok.line, stok.col)
            pf.functions.setdefault(n.text, []).append(fs)
        elif kw.text == "rule":
            lhs = p.term()
            p.eat("->")
            rhs = p.term()
            raw_rules.append((lhs, rhs, kw))
        elif kw.text in ("assume", "claim"):
            f = p.formula()
            if kw.text == "claim" and any(k == "claim" for k, _, _ in raw_formulas):
                raise ParseError("claim given more than once", kw.line, kw.col)
            raw_formulas.append((kw.text, f, kw))
        elif kw.text == "hint":
            binds = []
            while True:
                n = p.ident()
                p.eat("=")
                binds.append((n, p.term()))
                if not p.at(","):
                    break
                p.eat(",")
            raw_hints.append(binds)
        elif kw.text == "extend":
            pf.extend.append(p.ident().text)
            while p.at(","):
                p.eat(",")
                pf.extend.append(p.ident().text)
        elif kw.text == "option":
            k = p.ident().text
            p.eat("=")
            v = p.tok
            if v.kind not in ("id", "num"):
                raise p.error("option value must be a word or a number")
            p.i += 1
            pf.options[k] = v.text
        p.eat(";")
    if not any(k == "claim" for k, _, _ in raw_formulas):
        raise ParseError("problem has no claim")
    try:
        sig = L.Signature(pf.objects, pf.constants, pf.functions, {})
    except L.LogicError as exc:
        raise ParseError(str(exc)) from None
    for name in pf.extend:
        if name not in pf.functions:
            raise UnknownName(f"extend: unknown function {name!r}")
    # variable sorts: declarations plus binder annotations (must agree)
    for _, f, _ in raw_formulas:
        for q in _binders(f):
            if q.sort is None:
                continue
            known = pf.variables.get(q.var)
            if known is not None and known != q.sort:
                raise ParseError(f"variable {q.var!r} used with sorts {known} and {q.sort}", q.tok.line, q.tok.col)
            for o in (q.sort.source, q.sort.target):
                if o not in pf.objects:
                    raise UnknownName(f"unknown object {o!r}", q.tok.line, q.tok.col)
            _check_name(q.var, q.tok)
            pf.variables[q.var] = q.sort
    for v in pf.variables:
        if sig.declared(v):
            raise ParseError(f"{v!r} is both a variable and another symbol")
    scope = dict(pf.variables)
    for kind, f, _ in raw_formulas:
        g = _elab_formula(f, sig, scope)
        if kind == "claim":
            pf.claim = g
        else:
            pf.assumptions.append(g)
    for binds in raw_hints:
        h: dict[str, L.Term] = {}
        for n, t in binds:
            if n.text not in scope:
                raise ParseError(f"hint for undeclared variable {n.text!r}", n.line, n.col)
            if n.text in h:
                raise ParseError(f"variable {n.text!r} bound twice in one hint", n.line, n.col)
            el = _Elaborator(sig, scope)
            el.unify_sort(el.visit(t), el.fixed(scope[n.text]), n, f"hint for {n.text}")
            el.resolve()
            h[n.text] = el.build(t)
        pf.hints.append(h)
    for lhs, rhs, tok in raw_rules:
        try:
            pf.rules.append(RewriteRule(_pattern(lhs, sig), _pattern(rhs, sig)))
        except L.LogicError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
    try:
        L.check_sorts(pf.signature(), pf.formula())
    except L.LogicError as exc:
        raise ParseError(str(exc)) from None
    return pf


def _binders(f) -> Iterator[SQuant]:
    if isinstance(f, SQuant):
        yield f
        yield from _binders(f.body)
    elif isinstance(f, SNot):
        yield from _binders(f.body)
    elif isinstance(f, SBin):
        yield from _binders(f.left)
        yield from _binders(f.right)


def _elab_formula(f, sig: L.Signature, scope: dict[str, L.Sort]) -> L.Formula:
    if isinstance(f, SEq):
        el = _Elaborator(sig, scope)
        a, b = el.visit(f.lhs), el.visit(f.rhs)
        tok = f.lhs.tok
        el.unify_sort(a, b, tok, "equation")
        el.resolve()
        e = L.Eq(el.build(f.lhs), el.build(f.rhs))
        return L.Not(e) if f.negated else e
    if isinstance(f, SNot):
        return L.Not(_elab_formula(f.body, sig, scope))
    if isinstance(f, SBin):
        cls = {"&": L.And, "|": L.Or, "->": L.Implies}[f.op]
        return cls(_elab_formula(f.left, sig, scope), _elab_formula(f.right, sig, scope))
    if isinstance(f, SQuant):
        if f.var not in scope:
            raise ParseError(f"variable {f.var!r} has no sort; write {f.var} : u -> v", f.tok.line, f.tok.col)
        cls = L.Forall if f.kind == "forall" else L.Exists
        return cls(L.Var(f.var, scope[f.var]), _elab_formula(f.body, sig, scope))
    raise TypeError(f)


def _pattern(t: STerm, sig: L.Signature) -> Pattern:
    if isinstance(t, SZero):
        return PConst(L.ZERO)
    if isinstance(t, SName):
        if t.name in sig.constants:
            return PConst(t.name)
        return PVar(t.name)
    if t.name not in L.ARITH and t.name not in sig.functions:
        raise UnknownName(f"unknown function {t.name!r}", t.tok.line, t.tok.col)
    return PApp(t.name, tuple(_pattern(a, sig) for a in t.args))


def load_problem(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


__all__ = ["ParseError", "ProblemFile", "parse_problem", "load_problem", "render_pattern", "tokenize"]
