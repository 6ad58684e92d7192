"""Ideal membership in Z<X> by budgeted completion.

Completion computes a strong Groebner basis of a two-sided ideal: overlap
S-polynomials plus, where neither leading coefficient divides the other,
G-polynomials built from the extended gcd of the leading coefficients.
Every basis element records how it was derived from earlier elements
and the original generators; expanding that record gives a cofactor
representation over the generators, so every positive answer comes with a
certificate that :func:`check_certificate` can replay without trusting
this module.
"""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Union

from opstat.ncpoly import EMPTY, NCPoly, Word, render_terms, render_word

Summand = tuple[int, Word, int, Word]
# (left, ref, right); ref >= 0 is an original generator, ref < 0 stands for
# basis element -ref - 1
CertKey = tuple[Word, int, Word]


def _bref(k: int) -> int:
    return -k - 1


class MonomialOrder:
    """Degree-lexicographic order, optionally refined by an elimination block.

    ``precedence`` lists indeterminate ids from largest to smallest.  Words
    containing more letters from ``eliminate`` are larger than all others,
    which keeps the order compatible with multiplication.
    """

    def __init__(self, precedence: Sequence[int], eliminate: Iterable[int] = ()):
        self.precedence = tuple(precedence)
        if len(set(self.precedence)) != len(self.precedence):
            raise ValueError("duplicate indeterminate in precedence")
        self.eliminate = frozenset(eliminate)
        n = len(self.precedence)
        self._rank = {x: n - i for i, x in enumerate(self.precedence)}
        self._cache: dict[Word, tuple] = {}
        self._desc: dict[Word, tuple] = {}

    def key(self, word: Word) -> tuple:
        k = self._cache.get(word)
        if k is None:
            rank = self._rank
            try:
                ranks = tuple(rank[x] for x in word)
            except KeyError as exc:
                raise ValueError(f"indeterminate {exc.args[0]} not in monomial order") from None
            elim = sum(1 for x in word if x in self.eliminate) if self.eliminate else 0
            k = (elim, len(word), ranks)
            if len(self._cache) < 1_000_000:
                self._cache[word] = k
        return k

    def desc_key(self, word: Word) -> tuple:
        """Key whose ascending order is the descending monomial order."""
        k = self._desc.get(word)
        if k is None:
            e, n, ranks = self.key(word)
            k = (-e, -n, tuple(-r for r in ranks))
            if len(self._desc) < 1_000_000:
                self._desc[word] = k
        return k

    def leading(self, p: NCPoly) -> tuple[Word, int]:
        word = max(p.words(), key=self.key)
        return word, p.coeff(word)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MonomialOrder)
            and self.precedence == other.precedence
            and self.eliminate == other.eliminate
        )

    def __hash__(self) -> int:
        return hash((self.precedence, self.eliminate))

    def __repr__(self) -> str:
        return f"MonomialOrder({list(self.precedence)}, eliminate={sorted(self.eliminate)})"


def default_order(generators: Iterable[NCPoly], extra: Iterable[NCPoly] = ()) -> MonomialOrder:
    """Deglex with precedence by id (smaller ids are larger letters)."""
    letters: set[int] = set()
    for p in itertools.chain(generators, extra):
        letters |= p.letters()
    return MonomialOrder(sorted(letters))


@dataclass
class IdealPresentation:
    generators: list[NCPoly]
    order: MonomialOrder

    def __post_init__(self):
        if any(g.is_zero() for g in self.generators):
            raise ValueError("ideal generators must be nonzero")


@dataclass(frozen=True)
class MembershipCertificate:
    """``target == sum(c * left * generators[i] * right)`` over the summands."""

    target: NCPoly
    summands: tuple[Summand, ...]

    def expand(self, generators: Sequence[NCPoly]) -> NCPoly:
        return expand_summands(self.summands, generators)

    def generators_used(self) -> set[int]:
        return {i for _, _, i, _ in self.summands}

    def render(self, gen_names: Sequence[str] | None = None, names=None) -> str:
        parts = []
        for c, left, i, right in self.summands:
            g = gen_names[i] if gen_names else f"g{i + 1}"
            parts.append(f"{c}*[{render_word(left, names)}]*({g})*[{render_word(right, names)}]")
        return " + ".join(parts) if parts else "0"

    def __len__(self) -> int:
        return len(self.summands)


class IndexOutOfRange(ValueError):
    pass


def expand_summands(summands: Iterable[Summand], generators: Sequence[NCPoly]) -> NCPoly:
    acc: dict[Word, int] = {}
    for c, left, i, right in summands:
        if not 0 <= i < len(generators):
            raise IndexOutOfRange(f"generator index {i} out of range 0..{len(generators) - 1}")
        for w, gc in generators[i].items():
            word = left + w + right
            acc[word] = acc.get(word, 0) + c * gc
    return NCPoly(acc)


def check_certificate(cert: MembershipCertificate, ideal: IdealPresentation | Sequence[NCPoly]) -> bool:
    """Replay a certificate by exact expansion.

    Deliberately independent of completion: only ring arithmetic is used.
    """
    gens = ideal.generators if isinstance(ideal, IdealPresentation) else ideal
    return expand_summands(cert.summands, gens) == cert.target


# -- cofactor bookkeeping ----------------------------------------------------


def _cert_add(acc: dict[CertKey, int], cert: dict[CertKey, int], k: int, left: Word, right: Word) -> None:
    if not k:
        return
    for (l, i, r), c in cert.items():
        key = (left + l, i, r + right)
        s = acc.get(key, 0) + k * c
        if s:
            acc[key] = s
        else:
            del acc[key]


def _cert_summands(cert: dict[CertKey, int]) -> tuple[Summand, ...]:
    return tuple(
        (c, l, i, r)
        for (l, i, r), c in sorted(cert.items(), key=lambda kv: (kv[0][1], len(kv[0][0]), kv[0][0], kv[0][2]))
    )


def _gcd(a: int, b: int) -> int:
    return _xgcd(a, b)[0]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


@dataclass
class BasisElement:
    poly: NCPoly
    lm: Word
    lc: int
    cert: dict[CertKey, int]


@dataclass
class _Task:
    """Queue entry: 'input', 'spoly', 'gpoly', 'trivial_s' or 'trivial_g'."""

    kind: str
    i: int = -1
    j: int = -1
    left_i: Word = EMPTY
    right_i: Word = EMPTY
    left_j: Word = EMPTY
    right_j: Word = EMPTY
    poly: NCPoly | None = None
    cert: dict[CertKey, int] | None = None


@dataclass
class Reduction:
    remainder: NCPoly
    # derivation of (f - remainder); expand with CompletionState.expand
    cert: dict[CertKey, int]


class CompletionState:
    """Resumable completion of the ideal generated by ``generators``.

    One *operation* is one queue item processed (an input generator or an
    ambiguity) or one adjunction of a new basis element.
    """

    def __init__(self, generators: Sequence[NCPoly], order: MonomialOrder, max_degree: int | None = None):
        self.generators = list(generators)
        self.order = order
        self.max_degree = max_degree
        self.basis: list[BasisElement] = []
        self.alive: list[bool] = []
        self._lm_index: dict[Word, list[int]] = {}
        self._lm_lengths: set[int] = set()
        self._queue: list[tuple[tuple, int, _Task]] = []
        self._seq = itertools.count()
        self.ops = 0
        self.discarded = False
        self._full: dict[int, dict[CertKey, int]] = {}
        self.alphabet = sorted(set(order.precedence))
        for idx, g in enumerate(self.generators):
            if g.is_zero():
                continue
            self._push_input(g, {(EMPTY, idx, EMPTY): 1})

    # -- queue -------------------------------------------------------------

    def _push(self, degree: int, kind_rank: int, task: _Task) -> None:
        heapq.heappush(self._queue, ((degree, kind_rank), next(self._seq), task))

    def _push_input(self, poly: NCPoly, cert: dict[CertKey, int]) -> None:
        lm, _ = self.order.leading(poly)
        self._push(len(lm), 0, _Task("input", poly=poly, cert=cert))

    @property
    def pending(self) -> int:
        return len(self._queue)

    def is_complete(self) -> bool:
        """True when the queue is empty and nothing was cut by a degree bound."""
        return not self._queue and not self.discarded

    def copy(self) -> CompletionState:
        other = CompletionState.__new__(CompletionState)
        other.generators = list(self.generators)
        other.order = self.order
        other.max_degree = self.max_degree
        other.basis = list(self.basis)
        other.alive = list(self.alive)
        other._lm_index = {k: list(v) for k, v in self._lm_index.items()}
        other._lm_lengths = set(self._lm_lengths)
        other._queue = list(self._queue)
        other._seq = itertools.count(next(self._seq))
        other.ops = self.ops
        other.discarded = self.discarded
        other._full = dict(self._full)
        other.alphabet = list(self.alphabet)
        return other

    def extend(self, generators: Sequence[NCPoly]) -> CompletionState:
        """Copy of this state with extra generators appended (indices continue)."""
        other = self.copy()
        letters = set(other.alphabet)
        for g in generators:
            letters |= g.letters()
        if not letters <= set(self.order.precedence):
            raise ValueError("new generator uses letters outside the monomial order")
        other.alphabet = sorted(letters)
        for g in generators:
            idx = len(other.generators)
            other.generators.append(g)
            if not g.is_zero():
                other._push_input(g, {(EMPTY, idx, EMPTY): 1})
        return other

    # -- reduction ---------------------------------------------------------

    def _find_reducer(self, word: Word, coeff: int) -> tuple[int, int] | None:
        """A basis element whose leading term divides ``coeff * word``.

        Failing that, one whose leading coefficient is smaller than
        ``|coeff|``, so the coefficient can at least be cut down modulo it.
        """
        n = len(word)
        index = self._lm_index
        partial: tuple[int, int] | None = None
        for length in sorted(self._lm_lengths):
            if length > n:
                break
            for pos in range(n - length + 1):
                cands = index.get(word[pos : pos + length])
                if cands:
                    for k in cands:
                        lc = self.basis[k].lc
                        if coeff % lc == 0:
                            return k, pos
                        if partial is None and lc < abs(coeff):
                            partial = (k, pos)
        return partial

    def reduce(self, f: NCPoly, cert: dict[CertKey, int] | None = None) -> Reduction:
        """Fully reduce ``f``; the certificate covers ``f - remainder``."""
        dkey = self.order.desc_key
        todo = dict(f.terms)
        heap = [(dkey(w), w) for w in todo]
        heapq.heapify(heap)
        rem: dict[Word, int] = {}
        acc: dict[CertKey, int] = dict(cert) if cert else {}
        while heap:
            _, word = heap[0]
            coeff = todo.get(word)
            if coeff is None:
                heapq.heappop(heap)  # cancelled since it was pushed
                continue
            hit = self._find_reducer(word, coeff)
            if hit is None:
                rem[word] = coeff
                del todo[word]
                heapq.heappop(heap)
                continue
            k, pos = hit
            b = self.basis[k]
            q = coeff // b.lc
            left, right = word[:pos], word[pos + len(b.lm) :]
            for w, c in b.poly.items():
                ww = left + w + right
                old = todo.get(ww)
                s = (old or 0) - q * c
                if s:
                    todo[ww] = s
                    if old is None:
                        heapq.heappush(heap, (dkey(ww), ww))
                else:
                    todo.pop(ww, None)
            _cert_add(acc, {(EMPTY, _bref(k), EMPTY): 1}, q, left, right)
        return Reduction(NCPoly._raw(rem), acc)

    # -- completion --------------------------------------------------------

    def _adjoin(self, poly: NCPoly, cert: dict[CertKey, int]) -> int:
        lm, lc = self.order.leading(poly)
        if lc < 0:
            poly = -poly
            lc = -lc
            cert = {k: -c for k, c in cert.items()}
        idx = len(self.basis)
        self.basis.append(BasisElement(poly, lm, lc, cert))
        self.alive.append(True)
        # retire elements whose leading term the new one divides
        for k, b in enumerate(self.basis[:-1]):
            if not self.alive[k] or len(b.lm) < len(lm) or b.lc % lc:
                continue
            if _occurs(lm, b.lm):
                self._retire(k)
                self._push_input(b.poly, {(EMPTY, _bref(k), EMPTY): 1})
        self._lm_index.setdefault(lm, []).append(idx)
        self._lm_lengths.add(len(lm))
        self._queue_obstructions(idx)
        return idx

    def _retire(self, k: int) -> None:
        self.alive[k] = False
        lm = self.basis[k].lm
        lst = self._lm_index[lm]
        lst.remove(k)
        if not lst:
            del self._lm_index[lm]
            if not any(len(w) == len(lm) for w in self._lm_index):
                self._lm_lengths.discard(len(lm))

    def _queue_obstructions(self, new: int) -> None:
        bn = self.basis[new]
        for k, b in enumerate(self.basis):
            if not self.alive[k]:
                continue
            pairs = [(new, k), (k, new)] if k != new else [(new, new)]
            for i, j in pairs:
                self._overlaps(i, j)
            if k != new:
                # inclusions: lm of one inside lm of the other
                self._inclusions(new, k)
                self._inclusions(k, new)
            # over Z the trivial obstructions m_i * w * m_j matter too: their
            # S-polynomials when the leading coefficients share a factor and
            # a tail is present, their G-polynomials when neither leading
            # coefficient divides the other
            for i, j in pairs:
                bi, bj = self.basis[i], self.basis[j]
                deg = len(bi.lm) + len(bj.lm)
                if _gcd(bi.lc, bj.lc) > 1 and (len(bi.poly) > 1 or len(bj.poly) > 1):
                    self._push(deg, 2, _Task("trivial_s", i, j))
                if bi.lc % bj.lc and bj.lc % bi.lc:
                    self._push(deg, 2, _Task("trivial_g", i, j))

    def _overlaps(self, i: int, j: int) -> None:
        mi, mj = self.basis[i].lm, self.basis[j].lm
        for ov in range(1, min(len(mi), len(mj))):
            if mi[len(mi) - ov :] == mj[:ov]:
                # word = mi + mj[ov:] = mi[:-ov] + mj
                self._push_pair(i, j, EMPTY, mj[ov:], mi[: len(mi) - ov], EMPTY, len(mi) + len(mj) - ov)

    def _inclusions(self, i: int, j: int) -> None:
        mi, mj = self.basis[i].lm, self.basis[j].lm
        if len(mj) > len(mi):
            return
        for pos in range(len(mi) - len(mj) + 1):
            if mi[pos : pos + len(mj)] == mj:
                if len(mi) == len(mj) and i > j:
                    continue  # equal words: record once
                self._push_pair(i, j, EMPTY, EMPTY, mi[:pos], mi[pos + len(mj) :], len(mi))

    def _push_pair(self, i, j, li, ri, lj, rj, degree) -> None:
        if self.max_degree is not None and degree > self.max_degree:
            self.discarded = True
            return
        self._push(degree, 1, _Task("spoly", i, j, li, ri, lj, rj))
        ci, cj = self.basis[i].lc, self.basis[j].lc
        if ci % cj and cj % ci:
            self._push(degree, 1, _Task("gpoly", i, j, li, ri, lj, rj))

    def _combine(self, task: _Task, ki: int, kj: int) -> tuple[NCPoly, dict[CertKey, int]]:
        bi, bj = self.basis[task.i], self.basis[task.j]
        p = bi.poly.lrmul(task.left_i, task.right_i, ki) + bj.poly.lrmul(task.left_j, task.right_j, kj)
        cert: dict[CertKey, int] = {}
        _cert_add(cert, {(EMPTY, _bref(task.i), EMPTY): 1}, ki, task.left_i, task.right_i)
        _cert_add(cert, {(EMPTY, _bref(task.j), EMPTY): 1}, kj, task.left_j, task.right_j)
        return p, cert

    def _ambiguity(self, task: _Task) -> tuple[NCPoly, dict[CertKey, int]] | None:
        if task.kind == "input":
            return task.poly, task.cert
        if not (self.alive[task.i] and self.alive[task.j]):
            return None
        ci, cj = self.basis[task.i].lc, self.basis[task.j].lc
        if task.kind == "spoly":
            g, _, _ = _xgcd(ci, cj)
            lcm = ci // g * cj
            return self._combine(task, lcm // ci, -(lcm // cj))
        if task.kind == "gpoly":
            _, s, t = _xgcd(ci, cj)
            return self._combine(task, s, t)
        # trivial obstruction m_i * w * m_j: one word w per task, the next
        # word in shortlex order is queued behind it
        mi, mj = self.basis[task.i].lm, self.basis[task.j].lm
        w = task.left_i
        nxt = _next_word(w, self.alphabet)
        if self.max_degree is None or len(mi) + len(mj) + len(nxt) <= self.max_degree:
            self._push(len(mi) + len(mj) + len(nxt), 2, _Task(task.kind, task.i, task.j, left_i=nxt))
        else:
            self.discarded = True
        pair = _Task("pair", task.i, task.j, EMPTY, w + mj, mi + w, EMPTY)
        if task.kind == "trivial_s":
            g, _, _ = _xgcd(ci, cj)
            return self._combine(pair, cj // g, -(ci // g))
        _, s, t = _xgcd(ci, cj)
        return self._combine(pair, s, t)

    @staticmethod
    def _subtract_cert(cert: dict[CertKey, int], red: Reduction) -> dict[CertKey, int]:
        # red.cert covers (p - remainder) seeded with nothing; remainder = p - that
        out = dict(cert)
        _cert_add(out, red.cert, -1, EMPTY, EMPTY)
        return out

    def step(self, budget: int) -> list[int]:
        """Process up to ``budget`` operations; return ids of adjoined elements."""
        if budget < 1:
            raise ValueError("budget must be >= 1")
        added: list[int] = []
        start = self.ops
        while self._queue and self.ops - start < budget:
            _, _, task = heapq.heappop(self._queue)
            self.ops += 1
            before = len(self.basis)
            amb = self._ambiguity(task)
            added.extend(range(before, len(self.basis)))
            if amb is None:
                continue
            poly, cert = amb
            if poly.is_zero():
                continue
            red = self.reduce(poly)
            if red.remainder.is_zero():
                continue
            rcert = self._subtract_cert(cert, red)
            added.append(self._adjoin(red.remainder, rcert))
            self.ops += 1
        return added

    def run(self, budget: int | None = None) -> bool:
        """Run until complete or ``budget`` ops are spent; return completeness."""
        while self._queue:
            if budget is not None:
                left = budget
                if left <= 0:
                    break
                before = self.ops
                self.step(left)
                budget -= self.ops - before
            else:
                self.step(1_000_000)
        return self.is_complete()

    def live_basis(self) -> list[BasisElement]:
        return [b for b, a in zip(self.basis, self.alive) if a]

    def expand(self, cert: dict[CertKey, int]) -> dict[CertKey, int]:
        """Rewrite a derivation record over the original generators only."""
        need: set[int] = set()
        stack = [-r - 1 for (_, r, _) in cert if r < 0]
        while stack:
            k = stack.pop()
            if k in need or k in self._full:
                continue
            need.add(k)
            stack.extend(-r - 1 for (_, r, _) in self.basis[k].cert if r < 0)
        # derivations only refer to earlier elements
        for k in sorted(need):
            self._full[k] = self._expand_once(self.basis[k].cert)
        return self._expand_once(cert)

    def _expand_once(self, cert: dict[CertKey, int]) -> dict[CertKey, int]:
        out: dict[CertKey, int] = {}
        for (l, r, rr), c in cert.items():
            if r >= 0:
                _cert_add(out, {(EMPTY, r, EMPTY): 1}, c, l, rr)
            else:
                _cert_add(out, self._full[-r - 1], c, l, rr)
        return out

    def element_certificate(self, b: BasisElement | int) -> MembershipCertificate:
        k = b if isinstance(b, int) else next(i for i, x in enumerate(self.basis) if x is b)
        return MembershipCertificate(self.basis[k].poly, _cert_summands(self.expand({(EMPTY, _bref(k), EMPTY): 1})))


def _next_word(w: Word, alphabet: Sequence[int]) -> Word:
    """Successor of ``w`` in shortlex order over ``alphabet``."""
    digits = [alphabet.index(x) for x in w]
    k = len(digits) - 1
    while k >= 0 and digits[k] == len(alphabet) - 1:
        digits[k] = 0
        k -= 1
    if k < 0:
        return tuple(alphabet[0] for _ in range(len(w) + 1))
    digits[k] += 1
    return tuple(alphabet[d] for d in digits)


def _occurs(needle: Word, hay: Word) -> bool:
    n = len(needle)
    return any(hay[p : p + n] == needle for p in range(len(hay) - n + 1))


def reduce(f: NCPoly, state: CompletionState) -> tuple[NCPoly, MembershipCertificate]:
    """Normal form of ``f`` w.r.t. the current basis, with a certificate for ``f - remainder``."""
    red = state.reduce(f)
    return red.remainder, MembershipCertificate(f - red.remainder, _cert_summands(state.expand(red.cert)))


def step(state: CompletionState, budget: int) -> CompletionState:
    state.step(budget)
    return state


# -- membership queries ----------------------------------------------------


@dataclass(frozen=True)
class Member:
    certificate: MembershipCertificate


@dataclass(frozen=True)
class NotMember:
    basis: tuple[NCPoly, ...]
    remainder: NCPoly


@dataclass(frozen=True)
class Unknown:
    ops: int


Verdict = Union[Member, NotMember, Unknown]


class MembershipQuery:
    """Tracks the normal form of one target as the basis of ``state`` grows."""

    def __init__(self, target: NCPoly, state: CompletionState):
        self.target = target
        self.state = state
        self._remainder = target
        self._cert: dict[CertKey, int] = {}
        self._seen = -1
        self.refresh()

    def refresh(self) -> None:
        if len(self.state.basis) == self._seen and self.state.basis:
            return
        self._seen = len(self.state.basis)
        if self._remainder.is_zero():
            return
        red = self.state.reduce(self._remainder)
        self._remainder = red.remainder
        _cert_add(self._cert, red.cert, 1, EMPTY, EMPTY)

    @property
    def remainder(self) -> NCPoly:
        return self._remainder

    def verdict(self) -> Verdict:
        self.refresh()
        if self._remainder.is_zero():
            return Member(MembershipCertificate(self.target, _cert_summands(self.state.expand(self._cert))))
        if self.state.is_complete():
            return NotMember(tuple(b.poly for b in self.state.live_basis()), self._remainder)
        return Unknown(self.state.ops)


def verify_membership(f: NCPoly, ideal: IdealPresentation, budget: int, max_degree: int | None = None) -> Verdict:
    """Semi-decide ``f in ideal`` with at most ``budget`` completion operations."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    state = CompletionState(ideal.generators, ideal.order, max_degree=max_degree)
    query = MembershipQuery(f, state)
    spent = 0
    while True:
        v = query.verdict()
        if not isinstance(v, Unknown) or spent >= budget or not state.pending:
            return v
        before = state.ops
        state.step(1)
        spent += state.ops - before


def find_witness(ideal: IdealPresentation, dummy: int, budget: int) -> NCPoly | None:
    """Look for a basis element ``c - w`` with ``w`` free of eliminated letters.

    ``ideal.order`` must put ``dummy`` in its elimination block.
    """
    if dummy not in ideal.order.eliminate:
        raise ValueError("dummy must be in the elimination block of the order")
    state = CompletionState(ideal.generators, ideal.order)
    spent = 0
    checked = 0
    found: NCPoly | None = None
    while found is None:
        if len(state.basis) != checked:
            checked = len(state.basis)
            for k, b in enumerate(state.basis):
                if not state.alive[k] or b.lm != (dummy,) or abs(b.lc) != 1:
                    continue
                w = state.reduce(NCPoly.var(dummy) - b.poly.scale(b.lc)).remainder
                if not (w.letters() & ideal.order.eliminate):
                    found = w
                    break
        if found is None and (not state.pending or spent >= budget):
            return None
        if found is None:
            before = state.ops
            state.step(1)
            spent += state.ops - before
    # finish completion within the budget so the reported word is the normal form
    while state.pending and spent < budget:
        before = state.ops
        state.step(1)
        spent += state.ops - before
    return state.reduce(found).remainder


def render_certificate(cert: MembershipCertificate, generators: Sequence[NCPoly], names=None) -> str:
    """Human-readable identity ``target = sum of c*left*(g)*right``."""
    parts = []
    for c, left, i, right in cert.summands:
        g = render_terms(generators[i].terms, names)
        pre = "" if not left else render_word(left, names) + "*"
        post = "" if not right else "*" + render_word(right, names)
        k = "" if c == 1 else ("-" if c == -1 else f"{c}*")
        parts.append(f"{k}{pre}({g}){post}")
    return f"{render_terms(cert.target.terms, names)} = " + (" + ".join(parts) if parts else "0")
