"""Shared builders and random generators for the test suite."""

from __future__ import annotations

import random
from collections.abc import Sequence

from opstat import logic as L
from opstat.ncpoly import NCPoly

U = L.Sort("u", "u")


def small_sig(names: Sequence[str] = ("a", "b", "c", "d")) -> L.Signature:
    """One object ``u`` and the given constants of sort u -> u."""
    return L.Signature(["u"], {n: U for n in names})


def consts(sig: L.Signature, names: str) -> list[L.Const]:
    return [sig.const(n) for n in names.split()]


def word(*cs: L.Term) -> L.Term:
    return L.compose_all(list(cs))


def random_ground_term(rng: random.Random, letters: Sequence[L.Term], depth: int = 2) -> L.Term:
    """Random arithmetic ground term over endomorphism constants."""
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.1:
            return L.zero(letters[0].sort)
        return rng.choice(letters)
    op = rng.choice("*+-")
    if op == "-":
        return L.neg(random_ground_term(rng, letters, depth - 1))
    s = random_ground_term(rng, letters, depth - 1)
    t = random_ground_term(rng, letters, depth - 1)
    return L.compose(s, t) if op == "*" else L.add(s, t)


def random_formula(rng: random.Random, atoms: Sequence[L.Eq], depth: int = 4) -> L.Formula:
    """Random quantifier-free formula over the given atoms."""
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(atoms)
    k = rng.randrange(4)
    if k == 0:
        return L.Not(random_formula(rng, atoms, depth - 1))
    cls = (L.And, L.Or, L.Implies)[k - 1]
    return cls(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


def random_poly(rng: random.Random, nvars: int, max_deg: int, nterms: int = 3, coeff: int = 2) -> NCPoly:
    p = NCPoly.zero()
    for _ in range(nterms):
        d = rng.randint(0, max_deg)
        w = tuple(rng.randrange(nvars) for _ in range(d))
        c = rng.randint(-coeff, coeff)
        p = p + NCPoly.word(w, c)
    return p


def all_valuations(atoms: Sequence[L.Eq]):
    n = len(atoms)
    for bits in range(1 << n):
        yield {a: bool(bits >> i & 1) for i, a in enumerate(atoms)}


def axiom_instance(rng: random.Random, letters: Sequence[L.Term], schema: int, depth: int = 2) -> L.Eq:
    """Ground instance of one of the seven preadditive axiom schemata."""
    x, y, z = (random_ground_term(rng, letters, depth) for _ in range(3))
    zero = L.zero(x.sort)
    if schema == 0:
        return L.Eq(L.compose(x, L.compose(y, z)), L.compose(L.compose(x, y), z))
    if schema == 1:
        return L.Eq(L.add(x, L.add(y, z)), L.add(L.add(x, y), z))
    if schema == 2:
        return L.Eq(L.add(x, zero), x)
    if schema == 3:
        return L.Eq(L.add(x, L.neg(x)), zero)
    if schema == 4:
        return L.Eq(L.add(x, y), L.add(y, x))
    if schema == 5:
        return L.Eq(L.compose(x, L.add(y, z)), L.add(L.compose(x, y), L.compose(x, z)))
    if schema == 6:
        return L.Eq(L.compose(L.add(x, y), z), L.add(L.compose(x, z), L.compose(y, z)))
    raise ValueError(schema)


def random_sentence(rng: random.Random, letters: Sequence[L.Term], natoms: int = 3, depth: int = 3) -> L.Formula:
    """Random arithmetic ground sentence over small equations."""
    atoms = [
        L.Eq(random_ground_term(rng, letters, 2), random_ground_term(rng, letters, 2)) for _ in range(natoms)
    ]
    return random_formula(rng, atoms, depth)
