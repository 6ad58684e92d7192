"""Fair interleaved proof search over the Herbrand expansion.

Round ``n`` grants every live instance job ``schedule(n)`` completion
operations.  Instance ``k`` is the disjunction of the first ``k`` ground
instances with all non-arithmetic symbols removed by Ackermann's
reduction.  Any job whose idealisation becomes true proves the statement.
"""

from __future__ import annotations

import time
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

from opstat import logic as L
from opstat.ackermann import AckermannResult, ackermann_reduce_all
from opstat.herbrand import GroundEnumerator, HerbrandResult, HintError, herbrandise
from opstat.idealise import (
    FALSE,
    TRUE,
    UNKNOWN,
    ClauseIdealisation,
    IncrementalJob,
    SentenceJob,
    decompose,
    order_for,
)
from opstat.membership import IdealPresentation, MonomialOrder, find_witness
from opstat.ncpoly import IndeterminateTable, NCPoly, translate_literal


class RewriteBudgetExceeded(L.LogicError):
    pass


class ProverError(L.LogicError):
    pass


# -- rewrite rules -------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PConst:
    name: str  # "0" matches any zero constant


@dataclass(frozen=True)
class PApp:
    name: str
    args: tuple[Pattern, ...]


Pattern = PVar | PConst | PApp


def pattern_vars(p: Pattern) -> set[str]:
    if isinstance(p, PVar):
        return {p.name}
    if isinstance(p, PApp):
        return set().union(*(pattern_vars(a) for a in p.args)) if p.args else set()
    return set()


def render_pattern(p: Pattern) -> str:
    if isinstance(p, (PVar, PConst)):
        return p.name
    if p.name == "*":
        return f"({render_pattern(p.args[0])})*({render_pattern(p.args[1])})"
    if p.name == "+":
        return f"({render_pattern(p.args[0])}) + ({render_pattern(p.args[1])})"
    if p.name == "-":
        return f"-({render_pattern(p.args[0])})"
    return f"{p.name}(" + ", ".join(render_pattern(a) for a in p.args) + ")"


@dataclass(frozen=True)
class RewriteRule:
    """``lhs -> rhs`` over untyped patterns; function symbols match by name,
    so one rule covers every overload."""

    lhs: Pattern
    rhs: Pattern

    def __post_init__(self):
        if isinstance(self.lhs, PVar):
            raise ProverError("rule left-hand side must not be a bare variable")
        extra = pattern_vars(self.rhs) - pattern_vars(self.lhs)
        if extra:
            raise ProverError(f"rule right-hand side has unbound variables {sorted(extra)}")

    def __str__(self) -> str:
        return f"{render_pattern(self.lhs)} -> {render_pattern(self.rhs)}"


def match(p: Pattern, t: L.Term, env: dict[str, L.Term]) -> bool:
    if isinstance(p, PVar):
        bound = env.get(p.name)
        if bound is None:
            env[p.name] = t
            return True
        return bound == t
    if isinstance(p, PConst):
        return isinstance(t, L.Const) and t.name == p.name
    if not isinstance(t, L.App) or t.fn.name != p.name or len(t.args) != len(p.args):
        return False
    return all(match(pa, ta, env) for pa, ta in zip(p.args, t.args))


class _Builder:
    """Instantiates patterns, resolving overloads from argument sorts."""

    def __init__(self, symbols: Sequence[L.FunctionSymbol], sig: L.Signature | None):
        self.by_name: dict[tuple[str, tuple[L.Sort, ...]], L.FunctionSymbol] = {}
        for s in symbols:
            self.by_name[(s.name, s.sort.args)] = s
        self.sig = sig

    def build(self, p: Pattern, env: Mapping[str, L.Term], like: L.Term) -> L.Term:
        if isinstance(p, PVar):
            return env[p.name]
        if isinstance(p, PConst):
            if p.name == L.ZERO:
                return L.zero(like.sort)
            if self.sig is None or p.name not in self.sig.constants:
                raise ProverError(f"rule constant {p.name!r} needs a signature")
            return self.sig.const(p.name)
        args = tuple(self.build(a, env, like) for a in p.args)
        if p.name == "+":
            return L.add(*args)
        if p.name == "-":
            return L.neg(args[0])
        if p.name == "*":
            return L.compose(*args)
        key = (p.name, tuple(a.sort for a in args))
        fn = self.by_name.get(key)
        if fn is None and self.sig is not None:
            fn = self.sig.function(p.name, key[1])
        if fn is None:
            raise ProverError(f"cannot resolve {p.name} for argument sorts {[str(s) for s in key[1]]}")
        self.by_name[key] = fn
        return L.App(fn, args)


class Rewriter:
    def __init__(self, rules: Sequence[RewriteRule], symbols=(), sig: L.Signature | None = None, cap: int = 10_000):
        self.rules = list(rules)
        self.builder = _Builder(symbols, sig)
        self.cap = cap
        self.steps = 0
        self._memo: dict[L.Term, L.Term] = {}

    def normalize(self, t: L.Term) -> L.Term:
        hit = self._memo.get(t)
        if hit is not None:
            return hit
        out = self._normalize(t)
        self._memo[t] = out
        return out

    def _normalize(self, t: L.Term) -> L.Term:
        if isinstance(t, L.App):
            args = tuple(self.normalize(a) for a in t.args)
            if args != t.args:
                t = L.App(t.fn, args)
        for r in self.rules:
            env: dict[str, L.Term] = {}
            if match(r.lhs, t, env):
                self.steps += 1
                if self.steps > self.cap:
                    raise RewriteBudgetExceeded(f"more than {self.cap} rewrite steps")
                return self.normalize(self.builder.build(r.rhs, env, t))
        return t


def apply_universal_rules(
    f: L.Formula,
    rules: Sequence[RewriteRule],
    sig: L.Signature | None = None,
    cap: int = 10_000,
) -> L.Formula:
    """Rewrite every term of ``f`` innermost-first to a normal form."""
    if not rules:
        return f
    rw = Rewriter(rules, _symbols_of(f), sig, cap)
    return L.map_terms(f, rw.normalize)


def _symbols_of(f: L.Formula) -> list[L.FunctionSymbol]:
    return L.function_symbols(f)


# -- adjoint-style extension --------------------------------------------------


def extend_with_function(
    f: L.Formula,
    symbol: L.FunctionSymbol | str,
    sig: L.Signature | None = None,
) -> L.Formula:
    """Conjoin ``g(p) = g(q)`` to each positive identity of the assumptions.

    ``symbol`` is a unary symbol, or a name whose unary overloads in ``sig``
    are all used.  If ``f`` is an implication only its antecedent is
    touched; otherwise ``f`` is treated as an assumption itself.
    """
    if isinstance(symbol, L.FunctionSymbol):
        overloads = [symbol]
    else:
        if sig is None:
            raise ProverError("extension by name needs a signature")
        overloads = [s for s in sig.user_symbols() if s.name == symbol]
        if not overloads:
            raise L.UnknownSymbol(f"unknown function {symbol!r}")
    for s in overloads:
        if s.arity != 1:
            raise L.SortMismatch(f"extension symbol {s.name} must be unary")
    by_sort = {s.sort.args[0]: s for s in overloads}

    def ext_eq(e: L.Eq) -> L.Formula:
        fn = by_sort.get(e.lhs.sort)
        if fn is None:
            return e
        return L.And(e, L.Eq(L.App(fn, (e.lhs,)), L.App(fn, (e.rhs,))))

    def positive(g: L.Formula) -> L.Formula:
        if isinstance(g, L.Eq):
            return ext_eq(g)
        if isinstance(g, (L.And, L.Or)):
            return type(g)(positive(g.left), positive(g.right))
        if isinstance(g, L.Implies):
            return L.Implies(g.left, positive(g.right))
        if isinstance(g, (L.Forall, L.Exists)):
            return type(g)(g.var, positive(g.body))
        return g

    def top(g: L.Formula) -> L.Formula:
        if isinstance(g, (L.Forall, L.Exists)):
            return type(g)(g.var, top(g.body))
        if isinstance(g, L.Implies):
            return L.Implies(positive(g.left), g.right)
        return positive(g)

    return top(f)


# -- witness search -----------------------------------------------------------


def search_existential_witnesses(
    ideal: IdealPresentation,
    dummies: Sequence[int],
    budget: int,
    related: Mapping[int, Sequence[int]] | None = None,
    precedence: Sequence[int] | None = None,
) -> dict[int, NCPoly]:
    """Run :func:`find_witness` once per dummy; absent witnesses are omitted.

    ``related[d]`` lists further indeterminates to eliminate with ``d``
    (e.g. Ackermann constants standing for terms that contain ``d``).
    """
    out: dict[int, NCPoly] = {}
    prec = list(precedence) if precedence is not None else list(ideal.order.precedence)
    for d in dummies:
        block = {d, *((related or {}).get(d, ()))}
        order = MonomialOrder(prec, block)
        w = find_witness(IdealPresentation(ideal.generators, order), d, budget)
        if w is not None:
            out[d] = w
    return out


def poly_to_term(p: NCPoly, letters: Mapping[int, L.Term], sort: L.Sort) -> L.Term:
    """Rebuild a term from a polynomial; raises SortMismatch if ill-sorted."""
    if p.is_zero():
        return L.zero(sort)
    summands: list[L.Term] = []
    for word in sorted(p.words(), key=lambda w: (len(w), w), reverse=True):
        c = p.coeff(word)
        if not word:
            raise L.SortMismatch("constant term has no morphism interpretation")
        # words are read left to right as compositions
        t = L.compose_all([letters[x] for x in word])
        if t.sort != sort:
            raise L.SortMismatch(f"witness word has sort {t.sort}, expected {sort}")
        one = t if c > 0 else L.neg(t)
        for _ in range(abs(c)):
            summands.append(one)
    out = summands[0]
    for s in summands[1:]:
        out = L.add(out, s)
    return out


# -- configuration and trace --------------------------------------------------


@dataclass
class ProverConfig:
    max_rounds: int = 0  # 0 = unbounded
    op_unit: int = 200_000
    schedule: Callable[[int], int] | None = None
    hints: list[dict[str, L.Term]] = field(default_factory=list)
    rules: list[RewriteRule] = field(default_factory=list)
    extend: list[str] = field(default_factory=list)
    incremental: bool = True
    node_timeout: float = 1.0
    witness_search: bool = True
    witness_budget: int = 20_000
    max_degree: int | None = None
    simplify_fc: bool = True
    rewrite_cap: int = 10_000

    def ops_for_round(self, n: int) -> int:
        if self.schedule is not None:
            return self.schedule(n)
        return n * self.op_unit


@dataclass
class InstanceRecord:
    index: int
    bindings: dict[str, str]
    from_hint: bool


@dataclass
class ProofTrace:
    status: str  # "proved", "not_provable" or "timeout"
    herbrand: str = ""
    introduced: list[tuple[str, str]] = field(default_factory=list)
    instances: list[InstanceRecord] = field(default_factory=list)
    witnesses: dict[str, str] = field(default_factory=dict)
    ackermann: dict[str, str] = field(default_factory=dict)
    fc: list[str] = field(default_factory=list)
    formula: str = ""
    clauses: list[ClauseIdealisation] = field(default_factory=list)
    nodes: list[dict] = field(default_factory=list)
    node_clauses: list[L.Clause] = field(default_factory=list)
    tests: int = 0
    total_tests: int = 0
    rounds: int = 0
    ops: dict[int, int] = field(default_factory=dict)
    ackermann_calls: int = 0
    wall_time: float = 0.0
    table: IndeterminateTable | None = None
    order: MonomialOrder | None = None
    proved_by: int | None = None
    incremental: bool = True

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def certificates(self):
        return [(c, c.certificate) for c in self.clauses if c.certificate is not None]

    def to_json(self) -> dict:
        names = self.table.names if self.table else None
        return {
            "status": self.status,
            "herbrand": self.herbrand,
            "introduced": [{"symbol": n, "replaces": v} for n, v in self.introduced],
            "instances": [
                {"index": r.index, "bindings": r.bindings, "hint": r.from_hint} for r in self.instances
            ],
            "witnesses": self.witnesses,
            "ackermann": self.ackermann,
            "fc": self.fc,
            "formula": self.formula,
            "proved_by": self.proved_by,
            "incremental": self.incremental,
            "membership_tests": self.tests,
            "membership_tests_all_jobs": self.total_tests,
            "rounds": self.rounds,
            "ackermann_calls": self.ackermann_calls,
            "ops_per_job": {str(k): v for k, v in self.ops.items()},
            "wall_time_s": round(self.wall_time, 3),
            "indeterminates": [names[i] for i in sorted(names)] if names else [],
            "nodes": self.nodes,
            "clauses": [
                {
                    "clause": str(c.clause),
                    "verdict": c.verdict,
                    "generators": [g.render(names) for g in c.generators],
                    "candidates": [p.render(names) for p in c.candidates],
                    "candidate": c.k,
                    "certificate": None
                    if c.certificate is None
                    else [
                        {
                            "coeff": k,
                            "left": [names[x] for x in left],
                            "generator": i,
                            "right": [names[x] for x in right],
                        }
                        for k, left, i, right in c.certificate.summands
                    ],
                    "ops": c.ops,
                }
                for c in self.clauses
            ],
        }


# -- the prover ---------------------------------------------------------------


@dataclass
class _Job:
    index: int
    formula: L.Formula
    ack: AckermannResult
    table: IndeterminateTable
    runner: SentenceJob | IncrementalJob
    ops: int = 0

    @property
    def verdict(self) -> str:
        return self.runner.verdict

    @property
    def tests(self) -> int:
        return self.runner.outcome.tests


def _make_job(index: int, psi: L.Formula, sig: L.Signature, cfg: ProverConfig) -> _Job:
    ack = ackermann_reduce_all(sig, psi, cfg.simplify_fc)
    table = IndeterminateTable()
    if cfg.incremental:
        assumptions, claims = decompose(ack.flat)
        assumptions = assumptions + [c.formula() for c in ack.fc]
        runner: SentenceJob | IncrementalJob = IncrementalJob(
            assumptions, claims, table, cfg.node_timeout, cfg.max_degree
        )
    else:
        runner = SentenceJob(ack.result, table, cfg.max_degree)
    return _Job(index, psi, ack, table, runner)


def _resolve_hint(hint: Mapping[str, L.Term], h: HerbrandResult) -> dict[L.Var, L.Term]:
    """Map names to existential variables; universal variables in hint
    terms become the Herbrand constants that replaced them."""
    exist = {v.name: v for v in h.existentials}
    univ: dict[L.Var, L.Term] = {}
    for intro in h.introduced:
        if intro.kind == "constant":
            univ[intro.replaced] = L.Const(intro.name, intro.replaced.sort)
    out: dict[L.Var, L.Term] = {}
    for name, t in hint.items():
        v = exist.get(name)
        if v is None:
            raise HintError(f"hint binds {name!r}, which is not an existential variable")
        t = L.substitute_term(t, univ)
        if not L.is_ground_term(t):
            left = sorted(x.name for x in L.term_vars(t))
            raise HintError(f"hint for {name!r} mentions non-constant variables {left}")
        if t.sort != v.sort:
            raise L.SortMismatch(f"hint for {name} has sort {t.sort}, expected {v.sort}")
        out[v] = t
    return out


def _find_missing(
    h: HerbrandResult,
    hint: dict[L.Var, L.Term],
    sig: L.Signature,
    rewrite: Callable[[L.Formula], L.Formula],
    budget: int,
) -> dict[L.Var, L.Term]:
    """Dummy constants for unbound existentials, then elimination search."""
    missing = [v for v in h.existentials if v not in hint]
    if not missing:
        return {}
    ext = sig
    dummies: dict[L.Var, L.Const] = {}
    for v in missing:
        name, ext = ext.fresh("w" + v.name.rstrip("'"))
        ext = ext.with_constant(name, v.sort, internal=True)
        dummies[v] = L.Const(name, v.sort)
    inst = rewrite(L.substitute(h.matrix, {**hint, **dummies}))
    ack = ackermann_reduce_all(ext, inst)
    tbl = IndeterminateTable()
    gens: list[NCPoly] = []
    for a in L.atoms(ack.flat):
        g = translate_literal(a.lhs, a.rhs, tbl)
        if not g.is_zero():
            gens.append(g)
    origin = ack.origin()
    letters: dict[int, L.Term] = {}
    for name, ident in tbl.ids.items():
        c = next((k for k in origin if k.name == name), None)
        letters[ident] = origin[c] if c is not None else _const_by_name(ack.flat, name)
    found: dict[L.Var, L.Term] = {}
    if not gens:
        return found
    ideal = IdealPresentation(gens, order_for(tbl))
    uses = Counter(x for g in gens for w in g.words() for x in w)
    for v, d in dummies.items():
        if d.name not in tbl:
            continue
        did = tbl.ids[d.name]
        related = [i for i, t in letters.items() if i != did and any(s == d for s in L.subterms(t))]
        # eliminated letters first, then other function instances (rarest
        # first), then plain constants, so witnesses prefer plain letters and
        # the most frequently used instances
        block = [did, *related]
        rest = [i for i in tbl.order() if i not in block]
        apps = [i for i in rest if isinstance(letters[i], L.App)]
        prec = block + sorted(apps, key=lambda i: (uses[i], i))
        prec += [i for i in rest if not isinstance(letters[i], L.App)]
        res = search_existential_witnesses(ideal, [did], budget, {did: related}, prec)
        if did not in res:
            continue
        w = res[did]
        if any(any(s in dummies.values() for s in L.subterms(letters[x])) for x in w.letters()):
            continue
        try:
            found[v] = poly_to_term(w, letters, v.sort)
        except L.SortMismatch:
            continue
    return found


def _const_by_name(f: L.Formula, name: str) -> L.Const:
    for c in L.constants(f):
        if c.name == name:
            return c
    raise ProverError(f"indeterminate {name!r} has no constant")


def prove(sig: L.Signature, phi: L.Formula, cfg: ProverConfig | None = None) -> ProofTrace:
    cfg = cfg or ProverConfig()
    t0 = time.monotonic()
    L.check_sorts(sig, phi)
    work = phi
    for name in cfg.extend:
        work = extend_with_function(work, name, sig)
    rw_symbols = L.function_symbols(work)

    def rewrite(f: L.Formula) -> L.Formula:
        if not cfg.rules:
            return f
        rw = Rewriter(cfg.rules, rw_symbols, sig, cfg.rewrite_cap)
        return L.map_terms(f, rw.normalize)

    work = rewrite(work)
    h = herbrandise(sig, work)
    ext = h.extended_signature
    trace = ProofTrace("timeout", incremental=cfg.incremental)
    trace.herbrand = L.render_formula(h.sentence)
    trace.introduced = [(i.name, i.replaced.name) for i in h.introduced]

    hints: list[dict[L.Var, L.Term]] = []
    for raw in cfg.hints:
        hint = _resolve_hint(raw, h)
        hint = {v: _rewrite_term(t, rewrite) for v, t in hint.items()}
        if cfg.witness_search:
            found = _find_missing(h, hint, ext, rewrite, cfg.witness_budget)
            for v, t in found.items():
                trace.witnesses[v.name] = L.render_term(t)
            hint.update(found)
        hints.append(hint)

    stream = iter(GroundEnumerator(ext, h.sentence, hints))
    ground = h.is_ground()
    jobs: list[_Job] = []
    psi: L.Formula | None = None

    def next_instance() -> None:
        nonlocal psi
        inst = next(stream)
        trace.instances.append(
            InstanceRecord(
                len(trace.instances) + 1,
                {v.name: L.render_term(t) for v, t in inst.bindings.items()},
                inst.from_hint,
            )
        )
        phi_k = rewrite(inst.sentence)
        psi = phi_k if psi is None else L.Or(psi, phi_k)
        jobs.append(_make_job(len(jobs) + 1, psi, ext, cfg))
        trace.ackermann_calls += 1

    next_instance()
    n = 0
    winner: _Job | None = None
    while True:
        n += 1
        grant = cfg.ops_for_round(n)
        progress = False
        for job in jobs:
            if job.verdict != UNKNOWN:
                continue
            spent = job.runner.advance(grant)
            job.ops += spent
            progress = progress or spent > 0 or job.verdict != UNKNOWN
            if job.verdict == TRUE:
                winner = job
                break
        trace.rounds = n
        if winner is not None:
            trace.status = "proved"
            break
        if ground and jobs[0].verdict == FALSE:
            trace.status = "not_provable"
            winner = jobs[0]
            break
        if ground and not progress:
            break  # bounded completion ran dry: nothing more can be decided
        if cfg.max_rounds and n >= cfg.max_rounds:
            break
        if not ground:
            next_instance()
    trace.wall_time = time.monotonic() - t0
    trace.ops = {j.index: j.ops for j in jobs}
    trace.total_tests = sum(j.tests for j in jobs)
    shown = winner or jobs[-1]
    trace.proved_by = shown.index if winner is not None else None
    trace.tests = shown.tests
    trace.clauses = list(shown.runner.outcome.clauses)
    trace.nodes = list(shown.runner.outcome.nodes)
    trace.node_clauses = list(shown.runner.outcome.node_clauses)
    trace.table = shown.table
    trace.order = shown.runner.cache.order
    trace.formula = L.render_formula(shown.ack.result)
    trace.ackermann = {c.name: L.render_term(t) for t, c in shown.ack.table.items()}
    trace.fc = [L.render_formula(c.formula()) for c in shown.ack.fc]
    return trace


def _rewrite_term(t: L.Term, rewrite: Callable[[L.Formula], L.Formula]) -> L.Term:
    return rewrite(L.Eq(t, t)).lhs
