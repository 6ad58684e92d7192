"""Idealisation of arithmetic ground clauses and sentences.

A clause ``s1 != t1 | ... | p1 = q1 | ...`` is idealised to "some
``p_k - q_k`` lies in the ideal generated by the ``s_j - t_j``"; a sentence
is idealised clause by clause over its CNF.
"""

from __future__ import annotations

import time
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

from opstat import logic as L
from opstat.membership import (
    CompletionState,
    IdealPresentation,
    Member,
    MembershipCertificate,
    MembershipQuery,
    MonomialOrder,
    NotMember,
)
from opstat.ncpoly import IndeterminateTable, NCPoly, translate_literal

TRUE, FALSE, UNKNOWN = "true", "false", "unknown"


@dataclass
class ClauseIdealisation:
    clause: L.Clause
    ideal: IdealPresentation
    candidates: list[NCPoly]
    verdict: str = UNKNOWN
    # index into candidates of the successful one, and its certificate
    k: int | None = None
    certificate: MembershipCertificate | None = None
    basis: tuple[NCPoly, ...] = ()
    remainders: tuple[NCPoly, ...] = ()
    ops: int = 0

    @property
    def generators(self) -> list[NCPoly]:
        return self.ideal.generators


@dataclass
class SentenceIdealisation:
    clauses: list[ClauseIdealisation] = field(default_factory=list)
    verdict: str = UNKNOWN
    tests: int = 0
    nodes: list[dict] = field(default_factory=list)
    node_clauses: list[L.Clause] = field(default_factory=list)

    def certificates(self) -> list[tuple[ClauseIdealisation, MembershipCertificate]]:
        return [(c, c.certificate) for c in self.clauses if c.certificate is not None]


def order_for(tbl: IndeterminateTable, eliminate: Sequence[int] = ()) -> MonomialOrder:
    """Deglex, first-seen indeterminates largest."""
    return MonomialOrder(tbl.order(), eliminate)


class CompletionCache:
    """Completion states keyed by generator set; supersets start from subsets."""

    def __init__(self, order: MonomialOrder, max_degree: int | None = None):
        self.order = order
        self.max_degree = max_degree
        self._states: dict[frozenset[NCPoly], CompletionState] = {}
        self.hits = 0

    def state(self, generators: Sequence[NCPoly]) -> CompletionState:
        gens = list(dict.fromkeys(g for g in generators if not g.is_zero()))
        key = frozenset(gens)
        hit = self._states.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        best: CompletionState | None = None
        best_key: frozenset[NCPoly] = frozenset()
        for k, st in self._states.items():
            if len(k) > len(best_key) and k <= key:
                best, best_key = st, k
        if best is None:
            st = CompletionState(gens, self.order, self.max_degree)
        else:
            self.hits += 1
            st = best.extend([g for g in gens if g not in best_key])
        self._states[key] = st
        return st


class ClauseJob:
    """Resumable idealisation of one clause."""

    def __init__(
        self,
        clause: L.Clause,
        tbl: IndeterminateTable,
        cache: CompletionCache,
        generators: Sequence[NCPoly] | None = None,
    ):
        self.clause = clause
        if generators is None:
            generators = [translate_literal(s, t, tbl) for s, t in clause.negatives]
        self.candidates = [translate_literal(p, q, tbl) for p, q in clause.positives]
        self.state = cache.state(generators)
        self.start_ops = self.state.ops
        self.result = ClauseIdealisation(
            clause, IdealPresentation(self.state.generators, cache.order), list(self.candidates)
        )
        self.queries: list[MembershipQuery] = []
        if not self.candidates:
            self.result.verdict = FALSE
        elif any(c.is_zero() for c in self.candidates):
            k = next(i for i, c in enumerate(self.candidates) if c.is_zero())
            self._accept(k, MembershipCertificate(NCPoly.zero(), ()))
        else:
            self.queries = [MembershipQuery(c, self.state) for c in self.candidates]

    def _accept(self, k: int, cert: MembershipCertificate) -> None:
        self.result.verdict = TRUE
        self.result.k = k
        self.result.certificate = cert

    @property
    def done(self) -> bool:
        return self.result.verdict != UNKNOWN

    def _check(self) -> bool:
        best = None
        for k, q in enumerate(self.queries):
            v = q.verdict()
            if isinstance(v, Member):
                if best is None or len(v.certificate) < len(best[1]):
                    best = (k, v.certificate)
                break  # lexicographically first successful candidate
        if best is not None:
            self._accept(*best)
            return True
        if self.state.is_complete():
            self.result.verdict = FALSE
            self.result.basis = tuple(b.poly for b in self.state.live_basis())
            self.result.remainders = tuple(q.remainder for q in self.queries)
            return True
        return False

    def advance(self, budget: int, deadline: float | None = None) -> int:
        """Spend up to ``budget`` operations; return the number spent."""
        if self.done:
            return 0
        spent = 0
        while True:
            if self._check():
                break
            if spent >= budget or (deadline is not None and time.monotonic() >= deadline):
                break
            if not self.state.pending:
                # bounded mode exhausted the queue without completing
                break
            before = self.state.ops
            self.state.step(1)
            spent += self.state.ops - before
        self.result.ops += spent
        return spent

    @property
    def stuck(self) -> bool:
        """No further progress possible (bounded completion ran dry)."""
        return not self.done and not self.state.pending


def idealise_clause(
    c: L.Clause,
    tbl: IndeterminateTable,
    budget: int,
    order: MonomialOrder | None = None,
    max_degree: int | None = None,
) -> ClauseIdealisation:
    for s, t in (*c.negatives, *c.positives):
        translate_literal(s, t, tbl)  # registers indeterminates, checks groundness
    order = order or order_for(tbl)
    job = ClauseJob(c, tbl, CompletionCache(order, max_degree))
    job.advance(budget)
    return job.result


def _register(clauses: Sequence[L.Clause], tbl: IndeterminateTable) -> None:
    for c in clauses:
        for s, t in (*c.negatives, *c.positives):
            translate_literal(s, t, tbl)


class SentenceJob:
    """Resumable idealisation of every clause of CNF(phi)."""

    def __init__(
        self,
        phi: L.Formula,
        tbl: IndeterminateTable | None = None,
        max_degree: int | None = None,
        order: MonomialOrder | None = None,
    ):
        self.tbl = tbl if tbl is not None else IndeterminateTable()
        self.clauses = L.to_cnf(phi)
        _register(self.clauses, self.tbl)
        self.cache = CompletionCache(order or order_for(self.tbl), max_degree)
        self.jobs: list[ClauseJob] = []
        self.outcome = SentenceIdealisation()
        self._next = 0

    @property
    def verdict(self) -> str:
        return self.outcome.verdict

    def advance(self, budget: int, deadline: float | None = None) -> int:
        """Round-robin over open clauses; stops at the first False clause."""
        spent = 0
        while self._next < len(self.clauses):
            job = ClauseJob(self.clauses[self._next], self.tbl, self.cache)
            self._next += 1
            self.jobs.append(job)
            self.outcome.tests += 1
        stalled = False
        while self.outcome.verdict == UNKNOWN:
            open_jobs = [j for j in self.jobs if not j.done]
            falses = [j for j in self.jobs if j.result.verdict == FALSE]
            if falses:
                self.outcome.verdict = FALSE
                break
            if not open_jobs:
                self.outcome.verdict = TRUE
                break
            if stalled or spent >= budget or (deadline is not None and time.monotonic() >= deadline):
                break
            share = max(1, (budget - spent) // len(open_jobs))
            for j in open_jobs:
                spent += j.advance(min(share, max(1, budget - spent)), deadline)
                if j.result.verdict == FALSE:
                    break
            # bounded completion can run dry without settling a clause
            stalled = all(j.stuck for j in self.jobs if not j.done)
        self.outcome.clauses = [j.result for j in self.jobs]
        return spent


def idealise_sentence(
    phi: L.Formula,
    budget: int,
    tbl: IndeterminateTable | None = None,
    max_degree: int | None = None,
) -> SentenceIdealisation:
    job = SentenceJob(phi, tbl, max_degree)
    job.advance(budget)
    return job.outcome


# -- incremental idealisation ------------------------------------------------


def decompose(f: L.Formula) -> tuple[list[L.Formula], list[L.Formula]]:
    """Split ``f`` into (assumptions, claim disjuncts) with f == /\\A -> \\/C."""
    if isinstance(f, L.Implies):
        a, c = decompose(f.right)
        return L.conjuncts(f.left) + a, c
    if isinstance(f, L.Or):
        a1, c1 = decompose(f.left)
        a2, c2 = decompose(f.right)
        return a1 + a2, c1 + c2
    if isinstance(f, L.Not):
        return L.conjuncts(f.body), []
    return [], [f]


@dataclass
class _Node:
    clause: L.Clause
    generators: tuple[NCPoly, ...]
    depth: int  # number of splitting assumptions already included
    job: ClauseJob | None = None
    started: float | None = None


class IncrementalJob:
    """Idealisation of ``/\\ assumptions -> claim`` by the implication tree.

    Assumptions whose negation is a single clause are folded into every
    node.  The others are included one at a time, and only below nodes
    that could not be shown true within the node timeout.
    """

    def __init__(
        self,
        assumptions: Sequence[L.Formula],
        claim: Sequence[L.Formula] | L.Formula,
        tbl: IndeterminateTable | None = None,
        node_timeout: float = 1.0,
        max_degree: int | None = None,
        order: MonomialOrder | None = None,
    ):
        self.tbl = tbl if tbl is not None else IndeterminateTable()
        claims = [claim] if isinstance(claim, L.Formula) else list(claim)
        self.node_timeout = node_timeout
        base: list[L.Clause] = []
        self.splits: list[list[L.Clause]] = []
        for a in assumptions:
            cl = L.to_cnf(L.Not(a))
            if len(cl) == 1:
                base.append(cl[0])
            else:
                self.splits.append(cl)
        base_clause = L.Clause.make(
            [lit for c in base for lit in c.negatives], [lit for c in base for lit in c.positives]
        )
        roots = L.to_cnf(L.disj(claims)) if claims else [L.Clause((), ())]
        roots = [base_clause | r for r in roots]
        _register(roots, self.tbl)
        for group in self.splits:
            _register(group, self.tbl)
        self.cache = CompletionCache(order or order_for(self.tbl), max_degree)
        self.frontier: deque[_Node] = deque()
        for r in roots:
            self.frontier.append(_Node(r, self._gens(r, ()), 0))
        self.leaves: list[_Node] = []
        self.outcome = SentenceIdealisation()
        self.proved: list[ClauseIdealisation] = []

    def _gens(self, clause: L.Clause, parent: tuple[NCPoly, ...]) -> tuple[NCPoly, ...]:
        new = [translate_literal(s, t, self.tbl) for s, t in clause.negatives]
        return tuple(dict.fromkeys(list(parent) + new))

    @property
    def verdict(self) -> str:
        return self.outcome.verdict

    def _start(self, node: _Node) -> None:
        node.job = ClauseJob(node.clause, self.tbl, self.cache, node.generators)
        node.started = time.monotonic()
        self.outcome.tests += 1

    def _record(self, node: _Node, status: str) -> None:
        self.outcome.nodes.append(
            {"clause": str(node.clause), "depth": node.depth, "verdict": status, "ops": node.job.result.ops}
        )
        self.outcome.node_clauses.append(node.clause)

    def advance(self, budget: int, deadline: float | None = None) -> int:
        spent = 0
        while self.outcome.verdict == UNKNOWN:
            if spent >= budget or (deadline is not None and time.monotonic() >= deadline):
                break
            if self.frontier:
                node = self.frontier[0]
                if node.job is None:
                    self._start(node)
                node_deadline = node.started + self.node_timeout
                if deadline is not None:
                    node_deadline = min(node_deadline, deadline)
                spent += node.job.advance(budget - spent, node_deadline)
                job = node.job
                if job.done or job.stuck or time.monotonic() >= node.started + self.node_timeout:
                    self.frontier.popleft()
                    self._settle(node)
                elif spent >= budget or (deadline is not None and time.monotonic() >= deadline):
                    break
                continue
            if not self.leaves:
                self.outcome.verdict = TRUE
                break
            # every remaining node is a leaf that timed out: keep working on them
            if all(n.job.stuck for n in self.leaves):
                break
            share = max(1, (budget - spent) // len(self.leaves))
            for n in list(self.leaves):
                spent += n.job.advance(min(share, max(1, budget - spent)), deadline)
                if n.job.result.verdict == TRUE:
                    self.leaves.remove(n)
                    self.proved.append(n.job.result)
                    self._record(n, TRUE)
                elif n.job.result.verdict == FALSE:
                    self._record(n, FALSE)
                    self._fail(n)
                    break
        self.outcome.clauses = self.proved + [n.job.result for n in self.leaves]
        return spent

    def _fail(self, node: _Node) -> None:
        self.outcome.verdict = FALSE
        self.proved.append(node.job.result)

    def _settle(self, node: _Node) -> None:
        r = node.job.result
        if r.verdict == TRUE:
            self.proved.append(r)
            self._record(node, TRUE)
            return
        self._record(node, r.verdict)
        if node.depth < len(self.splits):
            for extra in self.splits[node.depth]:
                child = node.clause | extra
                self.frontier.append(_Node(child, self._gens(child, node.generators), node.depth + 1))
        elif r.verdict == FALSE:
            self._fail(node)
        else:
            self.leaves.append(node)


def idealise_incremental(
    assumptions: Sequence[L.Formula],
    claim: Sequence[L.Formula] | L.Formula,
    budget: int,
    node_timeout: float = 1.0,
    tbl: IndeterminateTable | None = None,
    max_degree: int | None = None,
) -> SentenceIdealisation:
    job = IncrementalJob(assumptions, claim, tbl, node_timeout, max_degree)
    job.advance(budget)
    return job.outcome
