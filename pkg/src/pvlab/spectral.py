"""Centered degree-4 spectral estimator for a planted vector in a subspace.

Given an observed N x n basis with rows y_i, the statistic is

    M = sum_i (||y_i||^2 - (n-1)/N) * y_i y_i^T - (3/N) * I_n .

The row weight ||y_i||^2 - (n-1)/N and the -(3/N) I centering make M
concentrate around (||v||_4^4 - 3/N) e e^T in the planted direction, so the
eigenvector of largest |eigenvalue| points at the planted vector whenever its
l4 norm differs from the Gaussian value 3/N.  The uncentered variant (without
the -(3/N) I term) is kept for comparison; it loses the dense case rho = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model_gen import BasisMatrix, PlantedVector

__all__ = [
    "SpectralStatistic",
    "SpectralResult",
    "RecoveryOutput",
    "ErrorReport",
    "build_statistic",
    "leading_eigenpair",
    "estimate_direction",
    "recover_gaussian_rule",
    "recover_orthonormal_rule",
    "score",
    "signs_match",
    "rank_one_bound_check",
]


@dataclass(frozen=True)
class SpectralStatistic:
    """The n x n symmetric statistic built from an observed basis."""

    matrix: np.ndarray
    centered: bool
    source_kind: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralResult:
    """Leading eigenpair of the statistic and the induced vector estimate."""

    statistic: SpectralStatistic
    leading_value: float
    leading_vector: np.ndarray
    raw_estimate: np.ndarray
    gap: float


@dataclass(frozen=True)
class RecoveryOutput:
    """Thresholded recovery of the planted vector from a raw estimate."""

    recovered: np.ndarray
    threshold_used: float
    sign_convention: int = 1


@dataclass(frozen=True)
class ErrorReport:
    """Error metrics after optimal global sign alignment."""

    l2_error: float
    entrywise_max_weighted: float
    exact_match: bool | None
    sign_used: int


def _as_matrix(Y_obs: BasisMatrix | np.ndarray) -> tuple[np.ndarray, str]:
    if isinstance(Y_obs, BasisMatrix):
        return Y_obs.data, Y_obs.kind
    return np.asarray(Y_obs, dtype=float), "array"


def build_statistic(
    Y_obs: BasisMatrix | np.ndarray, centered: bool = True
) -> SpectralStatistic:
    """Accumulate the degree-4 statistic from the rows of the observation.

    With centered=False the -(3/N) I term is omitted (the earlier variant of
    the method); the two outputs differ by exactly (3/N) I.
    """
    Y, kind = _as_matrix(Y_obs)
    N, n = Y.shape
    weights = np.einsum("ij,ij->i", Y, Y) - (n - 1) / N
    M = (Y * weights[:, None]).T @ Y
    if centered:
        M -= (3.0 / N) * np.eye(n)
    M = 0.5 * (M + M.T)
    return SpectralStatistic(M, centered=centered, source_kind=kind)


def leading_eigenpair(
    M: SpectralStatistic | np.ndarray,
) -> tuple[float, np.ndarray, float]:
    """Eigenpair of largest |eigenvalue| plus the singular-value gap.

    Returns (lambda, u, gap) where gap is the difference between the largest
    and second-largest singular value (for a symmetric matrix, the sorted
    |eigenvalues|).  A magnitude tie between the extreme eigenvalues is broken
    toward the positive one, and u is canonicalized so its largest-magnitude
    coordinate is positive.
    """
    A = M.matrix if isinstance(M, SpectralStatistic) else np.asarray(M, dtype=float)
    eigvals, eigvecs = np.linalg.eigh(A)
    lo, hi = eigvals[0], eigvals[-1]
    idx = -1 if abs(hi) >= abs(lo) else 0
    lam = float(eigvals[idx])
    u = eigvecs[:, idx].copy()
    u = _canonical_sign(u)
    svals = np.sort(np.abs(eigvals))[::-1]
    gap = float(svals[0] - svals[1]) if svals.size > 1 else float(svals[0])
    return lam, u, gap


def _canonical_sign(u: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(u)))
    return -u if u[j] < 0 else u


def estimate_direction(
    Y_obs: BasisMatrix | np.ndarray, centered: bool = True
) -> SpectralResult:
    """Build the statistic, take its leading eigenpair, and lift the
    eigenvector back to observation space via Y_obs @ u."""
    stat = build_statistic(Y_obs, centered=centered)
    lam, u, gap = leading_eigenpair(stat)
    Y, _ = _as_matrix(Y_obs)
    return SpectralResult(stat, lam, u, Y @ u, gap)


def recover_gaussian_rule(
    raw: np.ndarray, rho: float, sign: int = 1, threshold: float | None = None
) -> RecoveryOutput:
    """Threshold at 0.5/sqrt(N*rho) and snap surviving entries to
    +-1/sqrt(N*rho).  Needs the sparsity rho."""
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    raw = sign * np.asarray(raw, dtype=float)
    N = raw.size
    magnitude = 1.0 / np.sqrt(N * rho)
    if threshold is None:
        threshold = 0.5 * magnitude
    recovered = np.where(np.abs(raw) >= threshold, np.sign(raw) * magnitude, 0.0)
    return RecoveryOutput(recovered, threshold_used=threshold, sign_convention=sign)


def recover_orthonormal_rule(
    raw: np.ndarray, sign: int = 1, threshold_fraction: float = 0.5
) -> RecoveryOutput:
    """Keep entries within a factor 0.5 of the largest |entry|, take their
    signs, and normalize.  Does not use the sparsity rho."""
    raw = sign * np.asarray(raw, dtype=float)
    peak = float(np.max(np.abs(raw)))
    if peak == 0.0:
        raise ValueError("cannot threshold an all-zero estimate")
    threshold = threshold_fraction * peak
    vhat = np.sign(raw) * (np.abs(raw) >= threshold)
    vhat /= np.linalg.norm(vhat)
    return RecoveryOutput(vhat, threshold_used=threshold, sign_convention=sign)


def signs_match(recovered: np.ndarray, truth: np.ndarray) -> bool:
    """True when the two vectors have identical support and, up to one global
    flip, identical signs on it.  This is exact recovery for vectors whose
    nonzero entries share a common magnitude."""
    a = np.sign(recovered)
    b = np.sign(truth)
    return bool(np.array_equal(a, b) or np.array_equal(a, -b))


def score(
    estimate: np.ndarray,
    truth: PlantedVector | np.ndarray,
    recovery: RecoveryOutput | None = None,
) -> ErrorReport:
    """Score an estimate against the planted vector.

    The global sign minimizing the l2 error is chosen first (a zero inner
    product is broken by canonicalizing the estimate itself, so the report is
    exactly invariant under a sign flip of the estimate).  The entrywise
    metric weights coordinate j by |v_j| + 1/sqrt(N).  exact_match is filled
    from `recovery` when given, via support-and-sign comparison.
    """
    v = truth.entries if isinstance(truth, PlantedVector) else np.asarray(truth)
    est = np.asarray(estimate, dtype=float)
    if est.shape != v.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {v.shape}")
    dot = float(est @ v)
    if dot > 0:
        s = 1
    elif dot < 0:
        s = -1
    else:
        j = int(np.argmax(np.abs(est)))
        s = -1 if est[j] < 0 else 1
    aligned = s * est
    diff = aligned - v
    N = v.size
    weights = np.abs(v) + 1.0 / np.sqrt(N)
    exact = None
    if recovery is not None:
        exact = signs_match(recovery.recovered, v)
    return ErrorReport(
        l2_error=float(np.linalg.norm(diff)),
        entrywise_max_weighted=float(np.max(np.abs(diff) / weights)),
        exact_match=exact,
        sign_used=s,
    )


def rank_one_bound_check(
    A: np.ndarray, rho_s: float, b: np.ndarray
) -> tuple[float, float, bool]:
    """Check the rank-one eigenvector perturbation bound on one instance.

    For the leading eigenvector u1 of symmetric A (gap Delta between its two
    largest singular values) and the leading eigenvector of A + rho_s*b b^T,
    whenever |rho_s| ||b||^2 <= Delta/4 the sign-minimized distance between
    the two eigenvectors is at most 2*sqrt(2) |rho_s| ||b|| |b^T u1| / Delta.

    Returns (lhs, rhs, applicable); the bound is only claimed when applicable.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    _, u1, gap = leading_eigenpair(A)
    _, u1_tilde, _ = leading_eigenpair(A + rho_s * np.outer(b, b))
    lhs = min(
        float(np.linalg.norm(u1 - u1_tilde)), float(np.linalg.norm(u1 + u1_tilde))
    )
    bnorm = float(np.linalg.norm(b))
    applicable = gap > 0 and abs(rho_s) * bnorm**2 <= gap / 4.0
    if gap > 0:
        rhs = 2.0 * np.sqrt(2.0) * abs(rho_s) * bnorm * abs(float(b @ u1)) / gap
    else:
        rhs = np.inf
    return lhs, float(rhs), applicable
