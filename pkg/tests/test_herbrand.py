from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opstat import logic as L
from opstat.herbrand import GroundTerms, HintError, expansion, herbrandise
from opstat.parser import parse_problem
from util import U, small_sig


def sig_with_vars() -> L.Signature:
    return L.Signature(
        ["u"],
        {"c": U, "d": U},
        {"p": [L.FunctionSort((U,), U)], "q": [L.FunctionSort((U,), U)]},
        {"x": U, "y": U, "z": U},
    )


def test_ground_sentence_unchanged():
    sig = sig_with_vars()
    phi = L.Eq(sig.const("c"), sig.const("d"))
    h = herbrandise(sig, phi)
    assert h.sentence == phi
    assert h.introduced == []
    assert h.is_ground()


def test_universal_becomes_constant():
    sig = sig_with_vars()
    y = sig.var("y")
    p, q = sig.function("p"), sig.function("q")
    h = herbrandise(sig, L.Forall(y, L.Eq(L.App(p, [y]), L.App(q, [y]))))
    (intro,) = h.introduced
    assert intro.kind == "constant" and intro.replaced == y
    c = L.Const(intro.name, U)
    assert h.sentence == L.Eq(L.App(p, [c]), L.App(q, [c]))
    assert h.extended_signature.constants[intro.name] == U


def test_universal_after_existential_becomes_function():
    sig = sig_with_vars()
    x, y = sig.var("x"), sig.var("y")
    h = herbrandise(sig, L.Exists(x, L.Forall(y, L.Eq(x, y))))
    (intro,) = h.introduced
    assert intro.kind == "function" and intro.depends_on == (x,)
    assert h.existentials == [x]
    fs = h.extended_signature.functions[intro.name][0]
    assert fs.args == (U,) and fs.result == U


def test_free_variables_closed_universally():
    sig = sig_with_vars()
    x = sig.var("x")
    h = herbrandise(sig, L.Eq(x, sig.const("c")))
    assert [i.replaced for i in h.introduced] == [x]
    assert L.is_ground(h.sentence)


def test_herbrandise_fixed_point_and_well_sorted():
    sig = sig_with_vars()
    x, y, z = sig.var("x"), sig.var("y"), sig.var("z")
    phi = L.Forall(x, L.Exists(y, L.Forall(z, L.Implies(L.Eq(x, y), L.Eq(z, y)))))
    h1 = herbrandise(sig, phi)
    assert L.check_sorts(h1.extended_signature, h1.sentence)
    prefix, _ = L.split_prefix(h1.sentence)
    assert all(q is L.Exists for q, _ in prefix)
    h2 = herbrandise(h1.extended_signature, h1.sentence)
    assert h2.sentence == h1.sentence and h2.introduced == []


def test_moore_penrose_universals_become_constants():
    from importlib.resources import files

    pf = parse_problem(files("opstat.problems").joinpath("moore_penrose.op").read_text())
    h = herbrandise(pf.signature(), pf.formula())
    assert [i.replaced.name for i in h.introduced] == ["x", "a", "b"]
    assert all(i.kind == "constant" for i in h.introduced)
    assert [v.name for v in h.existentials] == ["p", "q", "r", "s", "y", "xd"]


def test_expansion_of_ground_formula_is_singleton():
    sig = sig_with_vars()
    phi = L.Eq(sig.const("c"), sig.const("c"))
    out = list(expansion(sig, phi))
    assert len(out) == 1 and out[0].sentence == phi


def test_expansion_starts_with_constants_in_declaration_order():
    sig = L.Signature(["u"], {"c": U, "d": U}, {}, {"x": U})
    x = sig.var("x")
    stream = iter(expansion(sig, L.Exists(x, L.Eq(x, x))))
    c, d = sig.const("c"), sig.const("d")
    assert next(stream).sentence == L.Eq(c, c)
    assert next(stream).sentence == L.Eq(d, d)
    assert next(stream).sentence == L.Eq(L.zero(U), L.zero(U))


def test_hints_come_first_and_are_completed():
    sig = sig_with_vars()
    x, y = sig.var("x"), sig.var("y")
    c, d = sig.const("c"), sig.const("d")
    h = L.Exists(x, L.Exists(y, L.Eq(x, y)))
    en = iter(expansion(sig, h, [{y: d}]))
    first = next(en)
    assert first.from_hint and first.bindings == {x: c, y: d}
    assert not next(en).from_hint


def test_hint_errors():
    sig = sig_with_vars()
    x, z = sig.var("x"), sig.var("z")
    h = L.Exists(x, L.Eq(x, x))
    with pytest.raises(HintError):
        expansion(sig, h, [{z: sig.const("c")}])
    with pytest.raises(HintError):
        expansion(sig, h, [{x: z}])


def test_ground_terms_sizes():
    sig = small_sig(["a"])
    gt = GroundTerms(sig)
    a = sig.const("a")
    assert gt.of_size(U, 1) == [a, L.zero(U)]
    two = gt.of_size(U, 2)
    assert two == [L.neg(a), L.neg(L.zero(U))]
    three = gt.of_size(U, 3)
    assert L.add(a, a) in three and L.compose(a, a) in three
    assert all(t.size() == 3 for t in three)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=25), st.integers(min_value=0, max_value=25))
def test_enumeration_is_fair(i, j):
    """Every pair of ground-term indices shows up at a finite position."""
    sig = L.Signature(["u"], {"c": U}, {"p": [L.FunctionSort((U,), U)]}, {"x": U, "y": U})
    x, y = sig.var("x"), sig.var("y")
    en = expansion(sig, L.Exists(x, L.Exists(y, L.Eq(x, y))))
    want = {x: en.terms.get(U, i), y: en.terms.get(U, j)}
    bound = (i + j + 1) * (i + j + 2) // 2
    seen = [inst.bindings for inst in itertools.islice(en, bound)]
    assert want in seen


def test_yielded_instances_are_ground_and_well_sorted():
    sig = sig_with_vars()
    x, y = sig.var("x"), sig.var("y")
    p = sig.function("p")
    en = expansion(sig, L.Exists(x, L.Exists(y, L.Eq(L.App(p, [x]), y))))
    for inst in itertools.islice(en, 40):
        assert L.is_ground(inst.sentence)
        assert L.check_sorts(sig, inst.sentence)
