"""End-to-end acceptance checks, one test per criterion.

Each test prints ``criterion N: PASS`` or ``criterion N: FAIL``; the same
lines are collected into a summary section at the end of the pytest run.
"""

from __future__ import annotations

import random
import time
from importlib.resources import files

import pytest

from opstat import logic as L
from opstat.ackermann import ackermann_reduce
from opstat.certfile import bundle_from_trace, check_bundle
from opstat.cli import EXIT_PROVED, main
from opstat.idealise import FALSE, TRUE, idealise_clause, idealise_sentence
from opstat.membership import IdealPresentation, Member, MonomialOrder, NotMember, verify_membership
from opstat.ncpoly import IndeterminateTable, NCPoly, translate_literal
from opstat.parser import parse_problem
from opstat.prover import ProverConfig, prove
from oracle import bounded_ideal
from util import all_valuations, axiom_instance, random_formula, random_poly, random_sentence, small_sig

MP_PATH = files("opstat.problems").joinpath("moore_penrose.op")


@pytest.fixture
def criterion():
    """Call with (number, ok, detail): prints a verdict line, then asserts."""

    def report(n: int, ok: bool, detail: str = "") -> None:
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return report


def _mp_trace(**kw):
    pf = parse_problem(MP_PATH.read_text())
    cfg = ProverConfig(hints=pf.hints, rules=pf.rules, extend=pf.extend, **kw)
    return prove(pf.signature(), pf.formula(), cfg)


@pytest.fixture(scope="module")
def mp():
    return _mp_trace()


def _ids(trace) -> dict[str, int]:
    ids = dict(trace.table.ids)
    star = {v: k for k, v in trace.ackermann.items()}
    ids["xs"] = ids[star["star(_x1)"]]
    return ids


# -- 1 ------------------------------------------------------------------------


def test_criterion_1_moore_penrose_end_to_end(mp, criterion, capsys):
    t0 = time.monotonic()
    code = main(["prove", str(MP_PATH)])
    elapsed = time.monotonic() - t0
    roots = [c for n, c in zip(mp.nodes, mp.node_clauses) if n["depth"] == 0]
    shared = len({c.negatives for c in roots}) == 1 and len(roots[0].negatives) > 0
    direct = _mp_trace(incremental=False)
    detail = (
        f"exit {code} in {elapsed:.2f}s, {len(roots)} claim clauses, "
        f"{mp.tests} incremental tests, {direct.tests} direct tests"
    )
    capsys.readouterr()
    ok = (
        code == EXIT_PROVED
        and elapsed < 60
        and len(roots) == 4
        and shared
        and mp.tests <= 60
        and direct.proved
        and direct.tests >= 200
    )
    criterion(1, ok, detail)


# -- 2 ------------------------------------------------------------------------


def test_criterion_2_certificate_replay(mp, criterion):
    ids = _ids(mp)
    x, xs, a, b, iu, iv = (NCPoly.var(ids[n]) for n in ("_x1", "xs", "_a2", "_b3", "iu", "iv"))
    target = x * xs * b * x * a * xs * x - x
    displayed = {x * iu - x, iv * x - x, x * a * xs * x - x * iu, x * xs * b * x - iv * x}
    bundle = bundle_from_trace(mp)
    (k, rec) = next((k, r) for k, r in enumerate(bundle.records) if r.target == target)
    used = {rec.generators[i] for _, _, i, _ in rec.summands}
    text = bundle.render()
    accepted = check_bundle(text)[k][1]
    rejected = True
    for i, (c, left, g, right) in enumerate(rec.summands):
        for delta in (1, -1):
            rec.summands[i] = (c + delta, left, g, right)
            rejected = rejected and not check_bundle(bundle.render())[k][1]
        rec.summands[i] = (c, left, g, right)
    ok = used == displayed and rec.expand() == target and accepted and rejected
    criterion(2, ok, f"{len(rec.summands)} summands over {len(used)} generators")


# -- 3 ------------------------------------------------------------------------


def test_criterion_3_disproof_of_split_clauses(mp, criterion):
    split = [c for n, c in zip(mp.nodes, mp.node_clauses) if n["depth"] == 1 and n["verdict"] == FALSE]
    t0 = time.monotonic()
    results = [idealise_clause(c, IndeterminateTable(), 20_000) for c in split]
    elapsed = time.monotonic() - t0
    ok = (
        len(split) == 4
        and all(r.verdict == FALSE and r.basis for r in results)
        and all(not rem.is_zero() for r in results for rem in r.remainders)
        and elapsed < 10
    )
    criterion(3, ok, f"{len(split)} clauses false in {elapsed:.2f}s, bases {[len(r.basis) for r in results]}")


# -- 4 ------------------------------------------------------------------------


def _oracle_cases(seed: int = 0, ideals: int = 200):
    rng = random.Random(seed)
    made = 0
    while made < ideals:
        n = rng.randint(1, 3)
        gens = [random_poly(rng, n, 2, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        made += 1
        cands = []
        for c in range(5):
            if c % 2 == 0:
                cands.append(random_poly(rng, n, 3, rng.randint(1, 4)))
                continue
            f = NCPoly.zero()
            for _ in range(rng.randint(1, 2)):
                g = rng.choice(gens)
                d = rng.randint(0, 1)
                left = tuple(rng.randrange(n) for _ in range(rng.randint(0, d)))
                right = tuple(rng.randrange(n) for _ in range(d - len(left)))
                f = f + g.lrmul(left, right, rng.randint(-3, 3))
            cands.append(f)
        yield n, gens, cands


def test_criterion_4_oracle_equivalence(criterion):
    agree = disagree = unknown = 0
    for n, gens, cands in _oracle_cases():
        lattice = bounded_ideal(gens, n, 3)
        pres = IdealPresentation(gens, MonomialOrder(list(range(n))))
        for f in cands:
            v = verify_membership(f, pres, 300)
            if not isinstance(v, (Member, NotMember)):
                unknown += 1
                continue
            if isinstance(v, Member) == lattice.contains(dict(f.terms)):
                agree += 1
            else:
                disagree += 1
    criterion(4, disagree == 0 and agree > 0, f"{agree} agree, {disagree} disagree, {unknown} unknown")


# -- 5 ------------------------------------------------------------------------


def test_criterion_5_cnf_equivalence(criterion):
    rng = random.Random(5)
    names = [f"c{i}" for i in range(11)]
    sig = small_sig(names)
    cs = [sig.const(n) for n in names]
    failures = 0
    for _ in range(1000):
        atoms = [L.Eq(cs[0], cs[i + 1]) for i in range(rng.randint(1, 10))]
        phi = random_formula(rng, atoms, depth=rng.randint(2, 5))
        clauses = L.to_cnf(phi)
        used = sorted(L.atoms(phi), key=L.render_formula)
        failures += any(
            L.eval_clauses(clauses, val) != L.eval_propositional(phi, val) for val in all_valuations(used)
        )
    criterion(5, failures == 0, f"{failures} failures")


# -- 6 ------------------------------------------------------------------------


def test_criterion_6_axiom_transparency(criterion):
    rng = random.Random(6)
    sig = small_sig(("a", "b", "c"))
    letters = [sig.const(n) for n in "abc"]
    sentences = [random_sentence(rng, letters) for _ in range(20)]
    table = [idealise_sentence(phi, 100, IndeterminateTable()).verdict for phi in sentences]
    nonzero = failures = 0
    for schema in range(7):
        for _ in range(50):
            alpha = axiom_instance(rng, letters, schema)
            nonzero += not translate_literal(alpha.lhs, alpha.rhs, IndeterminateTable()).is_zero()
            for phi, want in zip(sentences, table):
                got = idealise_sentence(L.Or(L.Not(alpha), phi), 100, IndeterminateTable()).verdict
                failures += got != want
    criterion(6, nonzero == 0 and failures == 0, f"{nonzero} nonzero axioms, {failures} mismatches")


# -- 7 ------------------------------------------------------------------------


def _true_sentences(rng, letters, count):
    out = []
    while len(out) < count:
        phi = random_sentence(rng, letters)
        if idealise_sentence(phi, 100, IndeterminateTable()).verdict == TRUE:
            out.append(phi)
    return out


def test_criterion_7_monotonicity(criterion):
    rng = random.Random(7)
    sig = small_sig(("a", "b", "c"))
    letters = [sig.const(n) for n in "abc"]
    phis = _true_sentences(rng, letters, 100)
    failures = 0
    for phi in phis:
        psi = random_sentence(rng, letters)
        failures += idealise_sentence(L.Or(phi, psi), 400, IndeterminateTable()).verdict != TRUE
    others = _true_sentences(rng, letters, 100)
    for phi, psi in zip(phis, others):
        failures += idealise_sentence(L.And(phi, psi), 400, IndeterminateTable()).verdict != TRUE
    criterion(7, failures == 0, f"{failures} failures")


# -- 8 ------------------------------------------------------------------------


def test_criterion_8_ackermann_example(criterion):
    uv = L.Sort("u", "v")
    sig = L.Signature(["u", "v"], {}, {"f": [L.FunctionSort((uv,), uv)]}, {"x": uv, "y": uv})
    x, y = sig.var("x"), sig.var("y")
    f = sig.function("f")
    fx, fy = L.App(f, [x]), L.App(f, [y])
    ffy = L.App(f, [fy])
    phi = L.conj([L.Not(L.Eq(x, y)), L.Eq(fx, fy), L.Or(L.Not(L.Eq(x, fx)), L.Not(L.Eq(fy, ffy)))])
    r = ackermann_reduce(sig, phi, f)
    c1, c2, c3 = r.order
    flat = L.conj([L.Not(L.Eq(x, y)), L.Eq(c1, c2), L.Or(L.Not(L.Eq(x, c1)), L.Not(L.Eq(c2, c3)))])
    fc = [
        L.Implies(L.Eq(x, y), L.Eq(c1, c2)),
        L.Implies(L.Eq(x, c2), L.Eq(c1, c3)),
        L.Implies(L.Eq(y, c2), L.Eq(c2, c3)),
    ]
    m = len(r.table)
    ok = (
        r.table == {fx: c1, fy: c2, ffy: c3}
        and r.flat == flat
        and [c.formula() for c in r.fc] == fc
        and m == 3
        and len(r.fc) == m * (m - 1) // 2
    )
    criterion(8, ok, f"m = {m}, {len(r.fc)} constraints")


# -- 9 ------------------------------------------------------------------------


def test_criterion_9_witness_search(criterion):
    text = MP_PATH.read_text()
    head, hint = text.split("hint ")
    pf = parse_problem(head + "hint p = a*star(x)*x, q = iu, r = x*star(x)*b, s = iv, y = x;\n")
    assert "xd" not in pf.hints[0]
    cfg = ProverConfig(hints=pf.hints, rules=pf.rules, extend=pf.extend)
    t0 = time.monotonic()
    tr = prove(pf.signature(), pf.formula(), cfg)
    elapsed = time.monotonic() - t0
    got = tr.witnesses.get("xd")
    ok = got == "star(_x1)*_b3*_x1*_a2*star(_x1)" and elapsed < 30 and tr.proved
    criterion(9, ok, f"xd = {got} in {elapsed:.2f}s")
