"""Command line: ``opstat prove FILE`` and ``opstat check-cert BUNDLE``.

Exit status: 0 proved (or bundle verified), 1 not provable (or bundle
rejected), 2 timeout / unknown, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Sequence

from opstat import logic as L
from opstat.certfile import BundleError, bundle_from_trace, check_bundle
from opstat.parser import ParseError, load_problem
from opstat.prover import ProverConfig, RewriteBudgetExceeded, prove

EXIT_PROVED, EXIT_NOT_PROVABLE, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("opstat")

_BOOL = {"true": True, "yes": True, "on": True, "1": True, "false": False, "no": False, "off": False, "0": False}


def _threads() -> int:
    raw = os.environ.get("OPSTAT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"OPSTAT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError("OPSTAT_THREADS must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opstat", description="Prove operator statements via ideal membership.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("prove", help="run the prover on a problem file")
    p.add_argument("file")
    p.add_argument("--max-rounds", type=int, default=None, help="0 = unbounded (default)")
    p.add_argument("--node-timeout-ms", type=int, default=None, help="per-node time for incremental mode (1000)")
    p.add_argument("--incremental", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--cert-out", help="write the certificate bundle here")
    p.add_argument("--trace-out", help="write the proof trace (JSON) here")
    p.add_argument("--witness-search", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--max-degree", type=int, default=None, help="bounded completion (no disproofs)")
    p.add_argument("--no-fc-simplify", action="store_true", help="keep reflexive FC hypotheses")
    p.add_argument("--op-unit", type=int, default=None, help="operations granted per round and job, times the round")
    c = sub.add_parser("check-cert", help="replay a certificate bundle")
    c.add_argument("path")
    return ap


def _config(pf, args) -> ProverConfig:
    opts = dict(pf.options)

    def pick(flag, key, conv, default):
        if flag is not None:
            return flag
        if key in opts:
            raw = opts[key]
            try:
                return conv(raw)
            except (ValueError, KeyError):
                raise ValueError(f"bad value {raw!r} for option {key}") from None
        return default

    def as_bool(raw: str) -> bool:
        return _BOOL[raw.lower()]

    max_rounds = pick(args.max_rounds, "max_rounds", int, 0)
    if max_rounds < 0:
        raise ValueError("--max-rounds must be >= 0")
    timeout_ms = pick(args.node_timeout_ms, "node_timeout_ms", int, 1000)
    if timeout_ms < 1:
        raise ValueError("--node-timeout-ms must be >= 1")
    max_degree = pick(args.max_degree, "max_degree", int, None)
    if max_degree is not None and max_degree < 1:
        raise ValueError("--max-degree must be >= 1")
    op_unit = pick(args.op_unit, "op_unit", int, ProverConfig.op_unit)
    if op_unit < 1:
        raise ValueError("--op-unit must be >= 1")
    return ProverConfig(
        max_rounds=max_rounds,
        op_unit=op_unit,
        hints=pf.hints,
        rules=pf.rules,
        extend=pf.extend,
        incremental=pick(args.incremental, "incremental", as_bool, True),
        node_timeout=timeout_ms / 1000.0,
        witness_search=pick(args.witness_search, "witness_search", as_bool, True),
        max_degree=max_degree,
        simplify_fc=not args.no_fc_simplify and pick(None, "fc_simplify", as_bool, True),
    )


def cmd_prove(args) -> int:
    try:
        _threads()
        pf = load_problem(args.file)
        cfg = _config(pf, args)
        trace = prove(pf.signature(), pf.formula(), cfg)
    except (OSError, ParseError, L.LogicError, ValueError) as exc:
        if isinstance(exc, RewriteBudgetExceeded):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    status = {"proved": EXIT_PROVED, "not_provable": EXIT_NOT_PROVABLE}.get(trace.status, EXIT_UNKNOWN)
    print(f"status: {trace.status}")
    print(f"rounds: {trace.rounds}")
    print(f"instances: {len(trace.instances)}")
    print(f"membership tests: {trace.tests} ({'incremental' if trace.incremental else 'direct'})")
    if trace.introduced:
        print("herbrand symbols: " + ", ".join(f"{n} for {v}" for n, v in trace.introduced))
    for name, t in trace.witnesses.items():
        print(f"witness: {name} = {t}")
    print(f"certificates: {len(trace.certificates())}")
    print(f"time: {trace.wall_time:.2f}s")
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            json.dump(trace.to_json(), fh, indent=2)
    if args.cert_out and trace.table is not None:
        with open(args.cert_out, "w", encoding="utf-8") as fh:
            fh.write(bundle_from_trace(trace).render())
    return status


def cmd_check(args) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        results = check_bundle(text)
    except BundleError as exc:
        print(f"rejected: {exc}")
        return EXIT_NOT_PROVABLE
    bad = [(k, msg) for k, ok, msg in results if not ok]
    for k, msg in bad:
        print(f"clause {k}: {msg}")
    if bad:
        print(f"rejected: {len(bad)} of {len(results)} identities fail")
        return EXIT_NOT_PROVABLE
    print(f"verified: {len(results)} identities")
    return EXIT_PROVED


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "prove":
        return cmd_prove(args)
    return cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
