from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opstat import logic as L
from opstat.idealise import (
    FALSE,
    TRUE,
    UNKNOWN,
    CompletionCache,
    decompose,
    idealise_clause,
    idealise_incremental,
    idealise_sentence,
    order_for,
)
from opstat.membership import check_certificate
from opstat.ncpoly import IndeterminateTable, NotGround, translate_literal
from util import U, axiom_instance, consts, random_sentence, small_sig, word


def table(names="a b c d") -> IndeterminateTable:
    tbl = IndeterminateTable()
    for n in names.split():
        tbl.get(n)
    return tbl


SIG = small_sig()
A, B, C, D = consts(SIG, "a b c d")


# -- clauses ------------------------------------------------------------------


def test_reflexive_clause_true_with_empty_certificate():
    r = idealise_clause(L.Clause.make([], [(A, A)]), table(), 10)
    assert r.verdict == TRUE and r.k == 0 and r.certificate.summands == ()


def test_axiom_clause_single_summand():
    s, t = word(A, B), C
    r = idealise_clause(L.Clause.make([(s, t)], [(s, t)]), table(), 10)
    assert r.verdict == TRUE
    assert r.certificate.summands == ((1, (), 0, ()),)
    assert check_certificate(r.certificate, r.generators)


def test_clause_without_positive_literals_is_false():
    r = idealise_clause(L.Clause.make([(A, B)], []), table(), 10)
    assert r.verdict == FALSE


def test_irreducible_candidate_is_false_with_basis():
    # x*y = 0 does not give y*x = 0
    r = idealise_clause(L.Clause.make([(word(A, B), L.zero(U))], [(word(B, A), L.zero(U))]), table(), 100)
    assert r.verdict == FALSE
    assert r.basis and r.remainders[0] == translate_literal(word(B, A), L.zero(U), table())


def test_first_successful_candidate_wins():
    cl = L.Clause.make([(A, B)], [(C, D), (word(A, C), word(B, C)), (A, B)])
    tbl = table()
    r = idealise_clause(cl, tbl, 100)
    members = {translate_literal(A, B, tbl), translate_literal(word(A, C), word(B, C), tbl)}
    assert r.verdict == TRUE
    assert r.k == min(i for i, p in enumerate(r.candidates) if p in members)
    assert check_certificate(r.certificate, r.generators)


def test_unknown_when_budget_too_small():
    # aa = ab has an infinite basis; a far-away candidate stays open
    cl = L.Clause.make([(word(A, A), word(A, B))], [(word(B, B, A, A, A, C), D)])
    r = idealise_clause(cl, table(), 2)
    assert r.verdict == UNKNOWN


def test_non_ground_clause_rejected():
    sig = L.Signature(["u"], {"a": U}, {}, {"x": U})
    with pytest.raises(NotGround):
        idealise_clause(L.Clause.make([], [(sig.var("x"), sig.const("a"))]), table(), 5)


def test_cache_reuses_subset_states():
    tbl = table()
    cache = CompletionCache(order_for(tbl))
    g1 = translate_literal(A, B, tbl)
    g2 = translate_literal(C, D, tbl)
    s1 = cache.state([g1])
    assert cache.state([g1]) is s1
    s2 = cache.state([g1, g2])
    assert s2 is not s1 and cache.hits == 2


# -- sentences ----------------------------------------------------------------


def test_sentence_reflexive_true():
    r = idealise_sentence(L.Eq(A, A), 10, table())
    assert r.verdict == TRUE and len(r.clauses) == 1


def test_sentence_false_clause_makes_aggregate_false():
    phi = L.And(L.Eq(A, A), L.Eq(A, B))
    assert idealise_sentence(phi, 50, table()).verdict == FALSE


def test_sentence_uses_cnf():
    # (a = b -> c = d) | (a = b -> b = a) has one clause which holds
    phi = L.Or(L.Implies(L.Eq(A, B), L.Eq(C, D)), L.Implies(L.Eq(A, B), L.Eq(B, A)))
    r = idealise_sentence(phi, 50, table())
    assert r.verdict == TRUE and r.tests == 1


def test_axiom_instance_translates_to_zero():
    rng = random.Random(3)
    for schema in range(7):
        alpha = axiom_instance(rng, [A, B, C], schema)
        assert translate_literal(alpha.lhs, alpha.rhs, table()).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=0, max_value=6))
def test_axioms_are_transparent(seed, schema):
    rng = random.Random(seed)
    letters = [A, B, C]
    alpha = axiom_instance(rng, letters, schema)
    phi = random_sentence(rng, letters)
    plain = idealise_sentence(phi, 100, table("a b c"))
    guarded = idealise_sentence(L.Or(L.Not(alpha), phi), 100, table("a b c"))
    assert plain.verdict == guarded.verdict


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_monotone_under_disjunction_and_conjunction(seed):
    rng = random.Random(seed)
    letters = [A, B, C]
    phi, psi = random_sentence(rng, letters), random_sentence(rng, letters)
    vphi = idealise_sentence(phi, 100, table("a b c")).verdict
    vpsi = idealise_sentence(psi, 100, table("a b c")).verdict
    if vphi == TRUE:
        assert idealise_sentence(L.Or(phi, psi), 400, table("a b c")).verdict == TRUE
        if vpsi == TRUE:
            assert idealise_sentence(L.And(phi, psi), 400, table("a b c")).verdict == TRUE


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_true_and_false_are_cnf_independent(seed):
    """Distributing a conjunction out of an implication keeps settled verdicts."""
    rng = random.Random(seed)
    letters = [A, B, C]
    p, q, r = (random_sentence(rng, letters, 2, 1) for _ in range(3))
    one = idealise_sentence(L.Implies(p, L.And(q, r)), 100, table("a b c")).verdict
    two = idealise_sentence(L.And(L.Implies(p, q), L.Implies(p, r)), 100, table("a b c")).verdict
    if UNKNOWN not in (one, two):
        assert one == two


# -- incremental --------------------------------------------------------------


def test_decompose_implication_and_disjunction():
    p, q, r = L.Eq(A, B), L.Eq(B, C), L.Eq(C, D)
    assert decompose(L.Implies(L.And(p, q), r)) == ([p, q], [r])
    assert decompose(L.Or(L.Not(p), r)) == ([p], [r])


def test_incremental_without_assumptions_matches_direct():
    claim = L.Or(L.Eq(word(A, B), C), L.Eq(A, A))
    inc = idealise_incremental([], claim, 100, tbl=table())
    direct = idealise_sentence(claim, 100, table())
    assert inc.verdict == direct.verdict == TRUE


def test_incremental_prunes_when_core_suffices():
    # the claim follows from the plain assumption alone, so the
    # disjunctive assumption is never split on
    plain = L.Eq(A, B)
    split = L.Implies(L.Eq(C, D), L.Eq(D, C))
    claim = L.Eq(word(A, C), word(B, C))
    r = idealise_incremental([plain, split], claim, 100, tbl=table())
    assert r.verdict == TRUE and r.tests == 1


def test_incremental_splits_on_implications():
    # c = d -> a = b is needed to conclude a*c = b*c from c = d
    assumptions = [L.Eq(C, D), L.Implies(L.Eq(C, D), L.Eq(A, B))]
    claim = L.Eq(word(A, C), word(B, C))
    r = idealise_incremental(assumptions, claim, 500, node_timeout=0.05, tbl=table())
    assert r.verdict == TRUE
    assert r.tests == 3  # root, then the two split children
    direct = idealise_sentence(L.Implies(L.conj(assumptions), claim), 500, table())
    assert direct.verdict == TRUE


def test_incremental_false_when_every_branch_fails():
    assumptions = [L.Implies(L.Eq(C, D), L.Eq(A, B))]
    claim = L.Eq(word(B, A), word(A, B))
    r = idealise_incremental(assumptions, claim, 500, node_timeout=0.05, tbl=table())
    assert r.verdict == FALSE
    assert idealise_sentence(L.Implies(L.conj(assumptions), claim), 500, table()).verdict == FALSE


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_incremental_true_implies_direct_true(seed):
    rng = random.Random(seed)
    letters = [A, B, C]
    assumptions = [random_sentence(rng, letters, 2, 1) for _ in range(2)]
    claim = random_sentence(rng, letters, 2, 1)
    inc = idealise_incremental(assumptions, claim, 150, node_timeout=0.05, tbl=table("a b c"))
    if inc.verdict == TRUE:
        direct = idealise_sentence(L.Implies(L.conj(assumptions), claim), 400, table("a b c"))
        assert direct.verdict == TRUE
