"""Identity suite and manufactured-solution harness."""

from .cases import CASES, CaseSpec, Expectation, get_case
from .identities import IdentityReport, IdentityResult, verify_identities
from .manufactured import CaseReport, CheckResult, build_case_problem, run_manufactured
from .runner import CampaignRunner

__all__ = [
    "CASES",
    "CampaignRunner",
    "CaseReport",
    "CaseSpec",
    "CheckResult",
    "Expectation",
    "IdentityReport",
    "IdentityResult",
    "build_case_problem",
    "get_case",
    "run_manufactured",
    "verify_identities",
]
