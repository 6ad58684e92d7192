"""Proving operator identities by noncommutative ideal membership."""

from opstat.logic import Clause, Signature, Sort, check_sorts, to_cnf
from opstat.membership import MembershipCertificate, MonomialOrder, check_certificate, verify_membership
from opstat.ncpoly import NCPoly
from opstat.parser import load_problem, parse_problem
from opstat.prover import ProverConfig, prove

__all__ = [
    "Clause",
    "MembershipCertificate",
    "MonomialOrder",
    "NCPoly",
    "ProverConfig",
    "Signature",
    "Sort",
    "check_certificate",
    "check_sorts",
    "load_problem",
    "parse_problem",
    "prove",
    "to_cnf",
    "verify_membership",
]
