"""
Statistical checks of the isoperimetric-type inequalities.
"""

from verify.checks import (
    check_brownian_isoperimetric,
    check_interval_monotonicity,
    check_isoperimetric,
    check_moments,
)
from verify.dominance import DominanceSpec, Empirical, Exponential, PointMass, check_dominance
from verify.report import CheckStatus, VerificationRecord, VerificationReport, build_record, judge
from verify.sign_scan import SignScanResult, sign_scan

__all__ = [
    "CheckStatus",
    "DominanceSpec",
    "Empirical",
    "Exponential",
    "PointMass",
    "SignScanResult",
    "VerificationRecord",
    "VerificationReport",
    "build_record",
    "check_brownian_isoperimetric",
    "check_dominance",
    "check_interval_monotonicity",
    "check_isoperimetric",
    "check_moments",
    "judge",
    "sign_scan",
]
