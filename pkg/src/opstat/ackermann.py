"""Ackermann's reduction: replace function instances by constants plus
functional-consistency constraints."""

from __future__ import annotations

from dataclasses import dataclass, field

from opstat.logic import (
    And,
    App,
    Const,
    Eq,
    Formula,
    FunctionSymbol,
    Implies,
    LogicError,
    Signature,
    Term,
    conj,
    formula_terms,
    function_symbols,
    is_quantifier_free,
    map_terms,
    subterms,
)


class NotQuantifierFree(LogicError):
    pass


class ArithmeticSymbol(LogicError):
    pass


@dataclass(frozen=True)
class FCConstraint:
    """``hypotheses -> lhs = rhs``; empty hypotheses after simplification."""

    i: int
    j: int
    hypotheses: tuple[Eq, ...]
    conclusion: Eq

    def formula(self) -> Formula:
        if not self.hypotheses:
            return self.conclusion
        return Implies(conj(self.hypotheses), self.conclusion)


@dataclass
class AckermannResult:
    flat: Formula
    fc: list[FCConstraint]
    result: Formula
    table: dict[Term, Const]
    extended_signature: Signature
    # constants in index order (index i -> constants[i - 1])
    order: list[Const] = field(default_factory=list)
    symbols: list[FunctionSymbol] = field(default_factory=list)

    @property
    def fc_formula(self) -> Formula | None:
        if not self.fc:
            return None
        return conj(c.formula() for c in self.fc)

    def origin(self) -> dict[Const, Term]:
        """Constant -> original instance (with nested instances restored)."""
        return {c: t for t, c in self.table.items()}


def _instances(f: Formula, symbol: FunctionSymbol) -> list[App]:
    """Distinct instances, innermost-first, left to right."""
    seen: dict[App, None] = {}
    for t in formula_terms(f):
        for s in subterms(t):
            if isinstance(s, App) and s.fn == symbol:
                seen.setdefault(s, None)
    return list(seen)


def ackermann_reduce(
    sig: Signature, f: Formula, symbol: FunctionSymbol, simplify_fc: bool = True
) -> AckermannResult:
    if not is_quantifier_free(f):
        raise NotQuantifierFree("Ackermann reduction needs a quantifier-free formula")
    if symbol.arithmetic:
        raise ArithmeticSymbol(f"arithmetic symbol {symbol.name!r} cannot be removed")
    instances = _instances(f, symbol)
    if not instances:
        return AckermannResult(f, [], f, {}, sig, [], [symbol])
    ext = sig
    table: dict[Term, Const] = {}
    order: list[Const] = []
    for inst in instances:
        name, ext = ext.fresh(symbol.name)
        ext = ext.with_constant(name, symbol.sort.result, internal=True)
        c = Const(name, symbol.sort.result)
        table[inst] = c
        order.append(c)

    def ack(t: Term) -> Term:
        # innermost instances are replaced first, so table keys are matched
        # against original subterms before their parents are rebuilt
        return _ack_term(t, table)

    flat = map_terms(f, ack)
    fc: list[FCConstraint] = []
    flat_args = [tuple(ack(a) for a in inst.args) for inst in instances]
    for i in range(len(instances)):
        for j in range(i + 1, len(instances)):
            hyps = tuple(Eq(a, b) for a, b in zip(flat_args[i], flat_args[j]))
            if simplify_fc:
                hyps = tuple(h for h in hyps if h.lhs != h.rhs)
            fc.append(FCConstraint(i + 1, j + 1, hyps, Eq(order[i], order[j])))
    fc_formula = conj(c.formula() for c in fc) if fc else None
    result = flat if fc_formula is None else Implies(fc_formula, flat)
    return AckermannResult(flat, fc, result, table, ext, order, [symbol])


def _ack_term(t: Term, table: dict[Term, Const]) -> Term:
    hit = table.get(t)
    if hit is not None:
        return hit
    if isinstance(t, App):
        args = tuple(_ack_term(a, table) for a in t.args)
        return t if args == t.args else App(t.fn, args)
    return t


def ackermann_reduce_all(sig: Signature, f: Formula, simplify_fc: bool = True) -> AckermannResult:
    """Remove every non-arithmetic function symbol, one symbol at a time.

    The next symbol is the one owning the first instance in innermost-first
    order.  Each round is independent; the FC constraints of all rounds are
    collected and the result is ``FC -> flat`` for the combined constraints.
    """
    if not is_quantifier_free(f):
        raise NotQuantifierFree("Ackermann reduction needs a quantifier-free formula")
    ext = sig
    flat = f
    fcs: list[FCConstraint] = []
    table: dict[Term, Const] = {}
    order: list[Const] = []
    symbols: list[FunctionSymbol] = []
    while True:
        syms = function_symbols(flat)
        for c in fcs:
            syms += [s for s in function_symbols(c.formula()) if s not in syms]
        pending = [s for s in syms if not s.arithmetic]
        if not pending:
            break
        sym = pending[0]
        # earlier FC hypotheses may still mention the symbol, so instances
        # are collected from them too and the constraints are rewritten
        carrier = flat if not fcs else And(flat, conj(c.formula() for c in fcs))
        r = ackermann_reduce(ext, carrier, sym, simplify_fc)
        ext = r.extended_signature
        flat = map_terms(flat, lambda t: _ack_term(t, r.table))
        fcs = [_map_fc(c, r.table) for c in fcs] + r.fc
        # keep the table in terms of original (fully nested) instances
        back = {c: t for t, c in table.items()}
        for inst, c in r.table.items():
            table[_restore(inst, back)] = c
        order.extend(r.order)
        symbols.append(sym)
    fc_formula = conj(c.formula() for c in fcs) if fcs else None
    result = flat if fc_formula is None else Implies(fc_formula, flat)
    return AckermannResult(flat, fcs, result, table, ext, order, symbols)


def _map_fc(c: FCConstraint, table: dict[Term, Const]) -> FCConstraint:
    hyps = tuple(Eq(_ack_term(h.lhs, table), _ack_term(h.rhs, table)) for h in c.hypotheses)
    return FCConstraint(c.i, c.j, hyps, c.conclusion)


def _restore(t: Term, back: dict[Const, Term]) -> Term:
    if isinstance(t, Const) and t in back:
        return back[t]
    if isinstance(t, App):
        return App(t.fn, tuple(_restore(a, back) for a in t.args))
    return t


def replay(flat: Formula, table: dict[Term, Const]) -> Formula:
    """Substitute instances back for their constants."""
    back = {c: t for t, c in table.items()}

    def undo(t: Term) -> Term:
        return _restore(t, back)

    return map_terms(flat, undo)
