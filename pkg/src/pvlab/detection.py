"""Hypothesis tests for a planted vector versus pure Gaussian noise.

Two detectors are implemented.  The spectral-norm test thresholds ||M|| (the
spectral norm of the centered degree-4 statistic) at c1/(6*N*rho).  The
l1/l2 test declares a planted vector when a candidate direction's l1-to-l2
ratio deviates from the Gaussian value sqrt(2N/pi) by at least c1*sqrt(N)/4;
fed with the spectral estimate it turns any good estimator into a detector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model_gen import SeedSpec, BasisMatrix, sample_detection_pair
from .spectral import build_statistic, estimate_direction, recover_orthonormal_rule

__all__ = [
    "DetectionOutcome",
    "ErrorRateReport",
    "DEFAULT_C1",
    "spectral_norm_statistic",
    "spectral_norm_outcome",
    "spectral_norm_test",
    "l1l2_test",
    "detect_via_estimation",
    "error_rates",
    "plugin_rho",
]

# The decision rules only need c1 in (0, 0.1) with |rho - 1/3| >= c1; a
# mid-range default keeps both satisfiable.
DEFAULT_C1 = 0.05


@dataclass(frozen=True)
class DetectionOutcome:
    statistic_value: float
    threshold: float
    decision: str  # "null" or "planted"
    test_kind: str  # "spectral_norm" or "l1l2"


@dataclass(frozen=True)
class ErrorRateReport:
    """Empirical type I (null called planted) and type II (planted called
    null) rates over `trials` independent streams per hypothesis."""

    type_I: float
    type_II: float
    trials: int
    params: tuple[int, int, float, float]  # (N, n, rho, c1)


def spectral_norm_statistic(Y_obs: BasisMatrix | np.ndarray) -> float:
    """Spectral norm of the centered statistic built from the observation."""
    M = build_statistic(Y_obs, centered=True).matrix
    return float(np.max(np.abs(np.linalg.eigvalsh(M))))


def spectral_norm_outcome(
    stat_value: float, N: int, rho: float, c1: float = DEFAULT_C1
) -> DetectionOutcome:
    """Decision rule: planted iff the statistic exceeds c1/(6*N*rho)."""
    threshold = c1 / (6.0 * N * rho)
    decision = "planted" if stat_value > threshold else "null"
    return DetectionOutcome(stat_value, threshold, decision, "spectral_norm")


def spectral_norm_test(
    Y_obs: BasisMatrix | np.ndarray, rho: float, c1: float = DEFAULT_C1
) -> DetectionOutcome:
    """Spectral-norm detector; rho must be known (or plugged in by the
    caller, see plugin_rho)."""
    Y = Y_obs.data if isinstance(Y_obs, BasisMatrix) else np.asarray(Y_obs)
    return spectral_norm_outcome(spectral_norm_statistic(Y_obs), Y.shape[0], rho, c1)


def l1l2_test(candidate: np.ndarray, c1: float = DEFAULT_C1) -> DetectionOutcome:
    """Declare planted when |l1/l2 ratio - sqrt(2N/pi)| >= c1*sqrt(N)/4.

    The statistic is exactly scale-invariant in the candidate.
    """
    v = np.asarray(candidate, dtype=float)
    l2 = float(np.linalg.norm(v))
    if l2 == 0.0:
        raise ValueError("l1/l2 test needs a nonzero candidate vector")
    N = v.size
    deviation = abs(float(np.abs(v).sum()) / l2 - np.sqrt(2.0 * N / np.pi))
    threshold = c1 * np.sqrt(N) / 4.0
    decision = "planted" if deviation >= threshold else "null"
    return DetectionOutcome(deviation, threshold, decision, "l1l2")


def detect_via_estimation(
    Y_obs: BasisMatrix | np.ndarray, c1: float = DEFAULT_C1
) -> DetectionOutcome:
    """Reduction pipeline: spectral estimate, then the l1/l2 test on the raw
    estimate (which lies in the observed column span by construction)."""
    result = estimate_direction(Y_obs)
    return l1l2_test(result.raw_estimate, c1=c1)


def _run_test(Y_obs: BasisMatrix, rho: float, c1: float, test_kind: str) -> DetectionOutcome:
    if test_kind in ("spectral", "spectral_norm"):
        return spectral_norm_test(Y_obs, rho, c1)
    if test_kind in ("l1l2", "reduction"):
        return detect_via_estimation(Y_obs, c1)
    raise ValueError(f"unknown test kind {test_kind!r}")


def error_rates(
    N: int,
    n: int,
    rho: float,
    c1: float,
    trials: int,
    test_kind: str,
    seed: SeedSpec | int,
) -> ErrorRateReport:
    """Empirical error rates over `trials` null and `trials` planted
    instances; trial t uses stream index base+t of the given seed."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    spec = SeedSpec.coerce(seed)
    false_planted = 0
    missed = 0
    for t in range(trials):
        trial_seed = SeedSpec(spec.master_seed, spec.stream_index + t)
        null_obs = sample_detection_pair(N, n, rho, trial_seed, "null")
        if _run_test(null_obs, rho, c1, test_kind).decision == "planted":
            false_planted += 1
        planted_obs = sample_detection_pair(N, n, rho, trial_seed, "planted")
        if _run_test(planted_obs, rho, c1, test_kind).decision == "null":
            missed += 1
    return ErrorRateReport(
        type_I=false_planted / trials,
        type_II=missed / trials,
        trials=trials,
        params=(N, n, rho, c1),
    )


def plugin_rho(candidate: np.ndarray) -> float:
    """Exploratory sparsity estimate: support fraction of the candidate after
    the rho-free orthonormal thresholding rule."""
    recovered = recover_orthonormal_rule(candidate).recovered
    return float(np.count_nonzero(recovered)) / candidate.size
