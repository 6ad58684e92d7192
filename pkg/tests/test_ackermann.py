from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opstat import logic as L
from opstat.ackermann import (
    ArithmeticSymbol,
    NotQuantifierFree,
    ackermann_reduce,
    ackermann_reduce_all,
    replay,
)
from util import U

UV = L.Sort("u", "v")
F_SORT = L.FunctionSort((UV,), UV)


def example():
    """(x != y) & f(x) = f(y) & (x != f(x) | f(y) != f(f(y)))"""
    sig = L.Signature(["u", "v"], {}, {"f": [F_SORT]}, {"x": UV, "y": UV})
    x, y = sig.var("x"), sig.var("y")
    f = sig.function("f")
    fx, fy = L.App(f, [x]), L.App(f, [y])
    ffy = L.App(f, [fy])
    phi = L.conj([
        L.Not(L.Eq(x, y)),
        L.Eq(fx, fy),
        L.Or(L.Not(L.Eq(x, fx)), L.Not(L.Eq(fy, ffy))),
    ])
    return sig, phi, f, (x, y, fx, fy, ffy)


def test_example_flat_and_fc():
    sig, phi, f, (x, y, fx, fy, ffy) = example()
    r = ackermann_reduce(sig, phi, f)
    c1, c2, c3 = r.order
    assert r.table == {fx: c1, fy: c2, ffy: c3}
    assert all(c.sort == UV for c in r.order)
    want_flat = L.conj([
        L.Not(L.Eq(x, y)),
        L.Eq(c1, c2),
        L.Or(L.Not(L.Eq(x, c1)), L.Not(L.Eq(c2, c3))),
    ])
    assert r.flat == want_flat
    want_fc = [
        L.Implies(L.Eq(x, y), L.Eq(c1, c2)),
        L.Implies(L.Eq(x, c2), L.Eq(c1, c3)),
        L.Implies(L.Eq(y, c2), L.Eq(c2, c3)),
    ]
    assert [c.formula() for c in r.fc] == want_fc
    assert r.result == L.Implies(L.conj(want_fc), want_flat)


def test_counts_match_pairs():
    sig, phi, f, _ = example()
    r = ackermann_reduce(sig, phi, f)
    m = len(r.table)
    assert m == 3 and len(r.fc) == m * (m - 1) // 2


def test_no_instances_is_identity():
    sig, _, f, (x, y, *_rest) = example()
    phi = L.Eq(x, y)
    r = ackermann_reduce(sig, phi, f)
    assert r.result == phi and r.table == {} and r.fc == []


def test_errors():
    sig, phi, f, (x, *_rest) = example()
    with pytest.raises(NotQuantifierFree):
        ackermann_reduce(sig, L.Forall(x, phi), f)
    with pytest.raises(ArithmeticSymbol):
        ackermann_reduce(sig, phi, L.plus_symbol(UV))


def test_reflexive_hypotheses_dropped_unless_disabled():
    sig = L.Signature(["u"], {"c": U, "d": U}, {"g": [L.FunctionSort((U, U), U)]})
    c, d = sig.const("c"), sig.const("d")
    g = sig.function("g")
    phi = L.Eq(L.App(g, [c, c]), L.App(g, [c, d]))
    r = ackermann_reduce(sig, phi, g)
    (fc,) = r.fc
    assert fc.hypotheses == (L.Eq(c, d),)
    r2 = ackermann_reduce(sig, phi, g, simplify_fc=False)
    assert r2.fc[0].hypotheses == (L.Eq(c, c), L.Eq(c, d))


def test_bare_conclusion_when_all_hypotheses_reflexive():
    sig = L.Signature(["u"], {"c": U}, {"g": [L.FunctionSort((U,), U)]})
    c = sig.const("c")
    g = sig.function("g")
    gc = L.App(g, [c])
    r = ackermann_reduce(sig, L.Eq(L.App(g, [gc]), gc), g)
    c1, c2 = r.order
    # g(c) is index 1, g(g(c)) index 2 with argument ack(g(c)) = c1
    assert [x.formula() for x in r.fc] == [L.Implies(L.Eq(c, c1), L.Eq(c1, c2))]


def test_reduce_all_two_symbols_innermost_first():
    sig = L.Signature(
        ["u"], {"c": U}, {"g": [L.FunctionSort((U,), U)], "h": [L.FunctionSort((U,), U)]}
    )
    c = sig.const("c")
    g, h = sig.function("g"), sig.function("h")
    hc = L.App(h, [c])
    phi = L.Eq(L.App(g, [hc]), c)
    r = ackermann_reduce_all(sig, phi)
    assert r.symbols == [h, g]
    k1, k2 = r.order
    assert r.table == {hc: k1, L.App(g, [hc]): k2}
    assert r.flat == L.Eq(k2, c)
    assert r.fc == []
    assert not L.function_symbols(r.result)


def test_overloads_never_pair():
    uu, vv = U, L.Sort("v", "v")
    sig = L.Signature(
        ["u", "v"], {"a": uu, "b": vv}, {"s": [L.FunctionSort((uu,), uu), L.FunctionSort((vv,), vv)]}
    )
    a, b = sig.const("a"), sig.const("b")
    su, sv = sig.function("s", [uu]), sig.function("s", [vv])
    phi = L.And(L.Eq(L.App(su, [a]), a), L.Eq(L.App(sv, [b]), b))
    r = ackermann_reduce_all(sig, phi)
    assert len(r.table) == 2 and r.fc == []


def test_arithmetic_formula_unchanged():
    sig = L.Signature(["u"], {"c": U})
    c = sig.const("c")
    phi = L.Eq(L.compose(c, c), L.add(c, L.zero(U)))
    r = ackermann_reduce_all(sig, phi)
    assert r.result == phi


def _random_term(rng, c, d, g, h, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([c, d])
    k = rng.randrange(4)
    if k == 0:
        return L.App(g, [_random_term(rng, c, d, g, h, depth - 1)])
    if k == 1:
        return L.App(h, [_random_term(rng, c, d, g, h, depth - 1)])
    a, b = (_random_term(rng, c, d, g, h, depth - 1) for _ in range(2))
    return L.compose(a, b) if k == 2 else L.add(a, b)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_properties_on_random_formulas(seed):
    rng = random.Random(seed)
    sig = L.Signature(
        ["u"], {"c": U, "d": U}, {"g": [L.FunctionSort((U,), U)], "h": [L.FunctionSort((U,), U)]}
    )
    c, d = sig.const("c"), sig.const("d")
    g, h = sig.function("g"), sig.function("h")
    eqs = [L.Eq(_random_term(rng, c, d, g, h, 3), _random_term(rng, c, d, g, h, 3)) for _ in range(3)]
    phi = L.Or(L.And(eqs[0], L.Not(eqs[1])), eqs[2])
    r = ackermann_reduce(sig, phi, g)
    assert g not in L.function_symbols(r.result)
    m = len(r.table)
    assert len(r.fc) == m * (m - 1) // 2
    assert len(set(r.table.values())) == m
    assert L.is_ground(r.result)
    assert L.check_sorts(r.extended_signature, r.result)
    assert replay(r.flat, r.table) == phi
    full = ackermann_reduce_all(sig, phi)
    assert not L.function_symbols(full.result) or all(s.arithmetic for s in L.function_symbols(full.result))
    assert replay(full.flat, full.table) == phi
