"""Certificate bundles: plain-text membership identities checkable in isolation.

Layout (one item per line, ``#`` lines are comments)::

    opstat-certificates 1
    indeterminates N
    <name>                      N lines, first-seen order
    order deglex <name> ...     precedence, largest first
    eliminate <name> ...        optional
    clause
    text <clause as written by the prover>
    generators M
    <polynomial>                M lines, indexed 0..M-1
    target <polynomial>
    summands S
    <coeff> <left word> <index> <right word>
    end

Words are ``*``-joined indeterminate names, ``1`` for the empty word.
Polynomials use the same names, e.g. ``x*iu - x``.  A bundle checks when
every clause's summands expand exactly to its target.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from opstat.ncpoly import NCPoly, PolySyntaxError, Word, parse_poly, parse_word, render_terms, render_word

MAGIC = "opstat-certificates 1"


class BundleError(ValueError):
    pass


@dataclass
class CertRecord:
    text: str
    generators: list[NCPoly]
    target: NCPoly
    summands: list[tuple[int, Word, int, Word]]

    def expand(self) -> NCPoly:
        acc = NCPoly.zero()
        for c, left, i, right in self.summands:
            if not 0 <= i < len(self.generators):
                raise BundleError(f"generator index {i} out of range")
            acc = acc + self.generators[i].lrmul(left, right, c)
        return acc

    def holds(self) -> bool:
        return self.expand() == self.target


@dataclass
class Bundle:
    names: list[str]
    precedence: list[str] = field(default_factory=list)
    eliminate: list[str] = field(default_factory=list)
    records: list[CertRecord] = field(default_factory=list)

    @property
    def ids(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def render(self) -> str:
        names = dict(enumerate(self.names))
        out = [MAGIC, f"indeterminates {len(self.names)}", *self.names]
        out.append("order deglex " + " ".join(self.precedence))
        if self.eliminate:
            out.append("eliminate " + " ".join(self.eliminate))
        for r in self.records:
            out.append("clause")
            out.append(f"text {r.text}")
            out.append(f"generators {len(r.generators)}")
            out.extend(render_terms(g.terms, names) for g in r.generators)
            out.append(f"target {render_terms(r.target.terms, names)}")
            out.append(f"summands {len(r.summands)}")
            for c, left, i, right in r.summands:
                out.append(f"{c} {render_word(left, names)} {i} {render_word(right, names)}")
            out.append("end")
        return "\n".join(out) + "\n"


def parse_bundle(text: str) -> Bundle:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    it = iter(enumerate(lines, 1))

    def take(prefix: str | None = None) -> tuple[int, str]:
        try:
            n, ln = next(it)
        except StopIteration:
            raise BundleError("unexpected end of bundle") from None
        if prefix is not None and not (ln == prefix or ln.startswith(prefix + " ")):
            raise BundleError(f"line {n}: expected {prefix!r}")
        return n, ln

    def count(prefix: str) -> int:
        n, ln = take(prefix)
        try:
            return int(ln[len(prefix) :].strip())
        except ValueError:
            raise BundleError(f"line {n}: bad count") from None

    _, head = take()
    if head.strip() != MAGIC:
        raise BundleError("not a certificate bundle")
    names = [take()[1].strip() for _ in range(count("indeterminates"))]
    if len(set(names)) != len(names):
        raise BundleError("duplicate indeterminate name")
    ids = {n: i for i, n in enumerate(names)}
    _, ln = take("order")
    parts = ln.split()
    if len(parts) < 2 or parts[1] != "deglex":
        raise BundleError("only deglex orders are supported")
    bundle = Bundle(names, parts[2:])
    try:
        while True:
            try:
                n, ln = next(it)
            except StopIteration:
                break
            if ln.startswith("eliminate"):
                bundle.eliminate = ln.split()[1:]
                continue
            if ln.strip() != "clause":
                raise BundleError(f"line {n}: expected 'clause'")
            _, t = take("text")
            text = t[5:]
            gens = [parse_poly(take()[1], ids) for _ in range(count("generators"))]
            _, t = take("target")
            target = parse_poly(t[len("target") :], ids)
            summands = []
            for _ in range(count("summands")):
                n, s = take()
                fields = s.split()
                if len(fields) != 4:
                    raise BundleError(f"line {n}: summand needs 4 fields")
                summands.append((int(fields[0]), parse_word(fields[1], ids), int(fields[2]), parse_word(fields[3], ids)))
            take("end")
            bundle.records.append(CertRecord(text, gens, target, summands))
    except (PolySyntaxError, ValueError) as exc:
        if isinstance(exc, BundleError):
            raise
        raise BundleError(str(exc)) from None
    return bundle


def check_bundle(text: str) -> list[tuple[int, bool, str]]:
    """Per-record (index, ok, message)."""
    bundle = parse_bundle(text)
    out = []
    for k, r in enumerate(bundle.records):
        try:
            ok = r.holds()
            msg = "ok" if ok else "expansion differs from target"
        except BundleError as exc:
            ok, msg = False, str(exc)
        out.append((k, ok, msg))
    return out


def bundle_from_trace(trace) -> Bundle:
    """Collect the certificates of a proof trace into a bundle."""
    tbl = trace.table
    names = [tbl.names[i] for i in sorted(tbl.names)]
    prec = [tbl.names[i] for i in trace.order.precedence] if trace.order else names
    elim = [tbl.names[i] for i in sorted(trace.order.eliminate)] if trace.order else []
    records = []
    for c in trace.clauses:
        if c.certificate is None:
            continue
        records.append(
            CertRecord(
                str(c.clause),
                list(c.generators),
                c.certificate.target,
                [tuple(s) for s in c.certificate.summands],
            )
        )
    return Bundle(names, prec, elim, records)


def make_bundle(
    names: Sequence[str],
    records: Iterable[tuple[str, Sequence[NCPoly], NCPoly, Sequence[tuple[int, Word, int, Word]]]],
) -> Bundle:
    return Bundle(
        list(names),
        list(names),
        [],
        [CertRecord(t, list(g), tgt, list(s)) for t, g, tgt, s in records],
    )
