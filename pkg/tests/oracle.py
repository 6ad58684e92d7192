"""Brute-force ideal membership oracle.

``f`` is declared a member when it is an integer combination of products
``a * g * b`` with cofactor words ``a`` and ``b`` each of degree at most
``cofactor_degree``.  Instead of enumerating coefficient vectors, the
products are inserted into an integer echelon form (a Hermite-style
lattice basis), which decides membership in their integer span exactly.
This is independent of the completion code: no monomial orders, no
overlaps, no certificates.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence

from opstat.ncpoly import NCPoly

Vec = dict[tuple[int, ...], int]


def _key(w: tuple[int, ...]) -> tuple:
    return (len(w), w)


def _pivot(v: Vec) -> tuple[int, ...]:
    return max(v, key=_key)


def _axpy(v: Vec, k: int, r: Vec) -> Vec:
    """v + k*r without zero entries."""
    out = dict(v)
    for w, c in r.items():
        s = out.get(w, 0) + k * c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def _combine(s: int, r: Vec, t: int, v: Vec) -> Vec:
    return _axpy({w: s * c for w, c in r.items() if s * c}, t, v)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class Lattice:
    """Integer span of sparse vectors, kept in echelon form by pivot word."""

    def __init__(self):
        self.rows: dict[tuple[int, ...], Vec] = {}

    def insert(self, v: Vec) -> None:
        v = {w: c for w, c in v.items() if c}
        while v:
            p = _pivot(v)
            r = self.rows.get(p)
            if r is None:
                self.rows[p] = v if v[p] > 0 else {w: -c for w, c in v.items()}
                return
            a, b = r[p], v[p]
            if b % a == 0:
                v = _axpy(v, -(b // a), r)
                continue
            g, s, t = _xgcd(a, b)
            if g < 0:
                g, s, t = -g, -s, -t
            self.rows[p] = _combine(s, r, t, v)
            v = _combine(a // g, v, -(b // g), r)

    def contains(self, v: Vec) -> bool:
        v = {w: c for w, c in v.items() if c}
        while v:
            p = _pivot(v)
            r = self.rows.get(p)
            if r is None or v[p] % r[p]:
                return False
            v = _axpy(v, -(v[p] // r[p]), r)
        return True


def cofactor_pairs(nvars: int, degree: int) -> Iterable[tuple[tuple[int, ...], tuple[int, ...]]]:
    words = [w for d in range(degree + 1) for w in itertools.product(range(nvars), repeat=d)]
    return itertools.product(words, words)


def bounded_ideal(generators: Sequence[NCPoly], nvars: int, cofactor_degree: int = 3) -> Lattice:
    lat = Lattice()
    for g in generators:
        for left, right in cofactor_pairs(nvars, cofactor_degree):
            lat.insert(dict(g.lrmul(left, right).terms))
    return lat


def oracle_member(f: NCPoly, generators: Sequence[NCPoly], nvars: int, cofactor_degree: int = 3) -> bool:
    return bounded_ideal(generators, nvars, cofactor_degree).contains(dict(f.terms))
