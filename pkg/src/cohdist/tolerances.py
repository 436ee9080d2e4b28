"""Numerical thresholds shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    # eigenvalues in [-negative_clip, 0) are clipped at validation
    negative_clip: float = 1e-10
    # eigenvalues at or below this count as zero inside x*log2(x)
    log_zero: float = 1e-12
    support_eigenvalue: float = 1e-10
    support_overlap: float = 1e-10
    unitary: float = 1e-10
    kraus: float = 1e-10
    slack: float = 1e-8


TOL = Tolerances()
