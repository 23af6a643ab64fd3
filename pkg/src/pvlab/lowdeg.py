"""Exact low-degree advantage for the planted-vector detection problem.

The degree-D advantage is the maximum of E_planted[f] / sqrt(E_null[f^2])
over polynomials f of degree at most D in the observed matrix entries.  For
a planted direction drawn uniformly from the sphere and coordinates carrying
a symmetric unit-variance distribution nu (Bernoulli-Rademacher by default,
atoms 0 and +-1/sqrt(rho)), it admits the closed form

    adv^2 = sum_d E[<u, u'>^d] * sum_{|alpha| = d} prod_i (E[h_{alpha_i}])^2

where h_k are the orthonormal Hermite polynomials, u, u' are independent
uniform unit vectors in R^n, and alpha ranges over N-dimensional multi-indices.
Only alpha whose nonzero entries are even and >= 4 contribute (the Hermite
moments of orders 1, 2, 3 and all odd orders vanish), which collapses the
inner sum to a dynamic program over compositions; a brute-force enumeration
of all alpha validates the program on small parameters.

Magnitudes span hundreds of orders (binomials up to C(N, D/4) against moments
of order rho^(2-k)), so the combination is accumulated in log space.  All
summands are squares times nonnegative sphere moments, so magnitudes alone
suffice, with no sign channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "HermiteEvaluator",
    "DegreeContribution",
    "AdvantageBreakdown",
    "hermite_eval",
    "hermite_moment",
    "hermite_moment_br",
    "sphere_moment",
    "log_sphere_moment",
    "composition_sum",
    "advantage",
    "advantage_bruteforce",
    "count_admissible",
]

DEFAULT_MAX_DEGREE = 64

# Smallest sparsity the advantage computation accepts; below this the
# Bernoulli-Rademacher atoms at +-1/sqrt(rho) leave double precision.
MIN_RHO = 1e-6

_RESCALE_LIMIT = 1e250


class HermiteEvaluator:
    """Orthonormal Hermite polynomials h_k, normalized so that
    E[h_j(z) h_k(z)] = delta_jk under z ~ N(0, 1).

    h_0(z) = 1, h_1(z) = z, and the normalized three-term recurrence
    h_{k+1}(z) = (z h_k(z) - sqrt(k) h_{k-1}(z)) / sqrt(k+1).  The running
    pair is rescaled by powers of two when it approaches overflow, so values
    stay accurate for large |z| with the magnitude carried in the exponent.
    """

    def __init__(self, max_degree: int = DEFAULT_MAX_DEGREE):
        if max_degree < 0:
            raise ValueError(f"max_degree must be >= 0, got {max_degree}")
        self.max_degree = max_degree
        self._sqrt = np.sqrt(np.arange(max_degree + 2, dtype=float))

    def all_values(self, z: float, upto: int | None = None) -> np.ndarray:
        """h_0(z), ..., h_upto(z) in one recurrence pass."""
        k_max = self.max_degree if upto is None else upto
        if not 0 <= k_max <= self.max_degree:
            raise ValueError(f"degree {k_max} beyond configured max {self.max_degree}")
        out = np.empty(k_max + 1)
        prev, cur = 0.0, 1.0
        scale_exp = 0
        out[0] = 1.0
        for k in range(k_max):
            prev, cur = cur, (z * cur - self._sqrt[k] * prev) / self._sqrt[k + 1]
            if abs(cur) > _RESCALE_LIMIT:
                prev = math.ldexp(prev, -512)
                cur = math.ldexp(cur, -512)
                scale_exp += 512
            out[k + 1] = math.ldexp(cur, scale_exp) if scale_exp else cur
        return out

    def eval(self, k: int, z: float) -> float:
        """Value of h_k at z."""
        if not 0 <= k <= self.max_degree:
            raise ValueError(f"degree {k} beyond configured max {self.max_degree}")
        return float(self.all_values(z, upto=k)[k])

    @staticmethod
    @lru_cache(maxsize=None)
    def monic_coefficients(k: int) -> tuple[int, ...]:
        """Integer coefficients (ascending powers) of the monic Hermite
        polynomial; h_k is the monic polynomial divided by sqrt(k!)."""
        if k == 0:
            return (1,)
        if k == 1:
            return (0, 1)
        prev2 = HermiteEvaluator.monic_coefficients(k - 2)
        prev1 = HermiteEvaluator.monic_coefficients(k - 1)
        out = [0] * (k + 1)
        for power, c in enumerate(prev1):
            out[power + 1] += c
        for power, c in enumerate(prev2):
            out[power] -= (k - 1) * c
        return tuple(out)

    def gaussian_product_moment(self, j: int, k: int) -> float:
        """E[h_j(z) h_k(z)] for z ~ N(0,1), by exact integration of the
        coefficient products against the Gaussian moments (m-1)!!.

        Independent of the recurrence evaluation path; equals delta_jk.
        """
        cj = self.monic_coefficients(j)
        ck = self.monic_coefficients(k)
        total = 0
        for r, a in enumerate(cj):
            if a == 0:
                continue
            for s, b in enumerate(ck):
                if b == 0 or (r + s) % 2:
                    continue
                total += a * b * _double_factorial(r + s - 1)
        return total / math.sqrt(math.factorial(j) * math.factorial(k))


def _double_factorial(m: int) -> int:
    # (-1)!! = 1 by convention
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


_default_evaluator = HermiteEvaluator(DEFAULT_MAX_DEGREE)


def hermite_eval(k: int, z: float) -> float:
    """Orthonormal Hermite polynomial h_k at z (k up to the default max)."""
    return _default_evaluator.eval(k, z)


def hermite_moment(
    k: int,
    atoms: list[tuple[float, float]],
    evaluator: HermiteEvaluator | None = None,
) -> float:
    """E[h_k(x)] for a finite-support distribution given as (value, prob)
    atoms.  Exact up to the evaluation of h_k at each atom."""
    ev = evaluator or _default_evaluator
    return float(sum(p * ev.eval(k, x) for x, p in atoms))


def hermite_moment_br(
    k: int, rho: float, evaluator: HermiteEvaluator | None = None
) -> float:
    """E[h_k(x)] for the three-atom Bernoulli-Rademacher variable with
    P{x = 0} = 1 - rho and P{x = +-1/sqrt(rho)} = rho/2.

    Odd k short-circuits to exactly 0 by symmetry.
    """
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    if k % 2:
        return 0.0
    ev = evaluator or _default_evaluator
    a = 1.0 / math.sqrt(rho)
    return (1.0 - rho) * ev.eval(k, 0.0) + rho * ev.eval(k, a)


def log_sphere_moment(n: int, d: int) -> float:
    """log E[<u, u'>^d] for independent uniform unit vectors in R^n;
    -inf for odd d."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    if d % 2:
        return -math.inf
    return (
        math.lgamma(n / 2.0)
        + math.lgamma((d + 1) / 2.0)
        - 0.5 * math.log(math.pi)
        - math.lgamma((n + d) / 2.0)
    )


def sphere_moment(n: int, d: int) -> float:
    """E[<u, u'>^d] = Gamma(n/2) Gamma((d+1)/2) / (sqrt(pi) Gamma((n+d)/2))
    for even d, and 0 for odd d."""
    return math.exp(log_sphere_moment(n, d))


def _logsumexp(values: list[float]) -> float:
    top = max(values, default=-math.inf)
    if top == -math.inf:
        return -math.inf
    return top + math.log(sum(math.exp(v - top) for v in values))


def _log_binomial(N: int, m: int) -> float:
    if m < 0 or m > N:
        return -math.inf
    return math.lgamma(N + 1) - math.lgamma(m + 1) - math.lgamma(N - m + 1)


def _log_squared_moments(rho: float, D: int) -> list[float]:
    """log (E[h_k(x)])^2 for k = 0..D, x Bernoulli-Rademacher(rho)."""
    ev = HermiteEvaluator(max(D, 1))
    at_zero = ev.all_values(0.0, upto=D)
    at_atom = ev.all_values(1.0 / math.sqrt(rho), upto=D)
    moments = (1.0 - rho) * at_zero + rho * at_atom
    moments[1::2] = 0.0
    with np.errstate(divide="ignore"):
        return (2.0 * np.log(np.abs(moments))).tolist()


def _log_composition_sum(log_sq: list[float], d: int, m: int) -> float:
    """log g(d, m): sum over ordered compositions of d into m even parts
    >= 4 of the product of squared Hermite moments."""
    memo: dict[tuple[int, int], float] = {}

    def rec(rem: int, parts: int) -> float:
        if parts == 0:
            return 0.0 if rem == 0 else -math.inf
        key = (rem, parts)
        if key not in memo:
            terms = [
                log_sq[a] + rec(rem - a, parts - 1)
                for a in range(4, rem - 4 * (parts - 1) + 1, 2)
            ]
            memo[key] = _logsumexp(terms)
        return memo[key]

    return rec(d, m)


def composition_sum(d: int, m: int, rho: float) -> float:
    """g(d, m): the inner sum over multi-index mass patterns with support
    size m and total degree d, for the Bernoulli-Rademacher distribution.

    Zero whenever d < 4m or d is odd (no admissible composition).
    """
    if d < 0 or m < 1:
        raise ValueError(f"need d >= 0 and m >= 1, got d={d}, m={m}")
    if d % 2 or d < 4 * m:
        return 0.0
    log_sq = _log_squared_moments(rho, d)
    return math.exp(_log_composition_sum(log_sq, d, m))


@dataclass(frozen=True)
class DegreeContribution:
    d: int
    sphere_moment: float
    alpha_sum: float
    contribution: float
    log_contribution: float


@dataclass(frozen=True)
class AdvantageBreakdown:
    N: int
    n: int
    rho: float
    D: int
    per_degree: list[DegreeContribution]
    adv_squared: float
    adv: float
    log_adv_squared: float
    log_space: bool = True
    underflowed: bool = False


def advantage(N: int, n: int, rho: float, D: int) -> AdvantageBreakdown:
    """Exact degree-D advantage for the detection problem with parameters
    (N, n, rho), with per-degree breakdown.

    adv^2 = 1 + sum over even d in [4, D] of
        E[<u,u'>^d] * sum_m C(N, m) * g(d, m),
    accumulated in log space.  A per-degree contribution whose log is finite
    but flushes to zero on exponentiation sets the underflow flag.
    """
    if N < 1 or n < 1 or D < 0:
        raise ValueError(f"need N, n >= 1 and D >= 0, got N={N}, n={n}, D={D}")
    if not MIN_RHO <= rho <= 1:
        raise ValueError(f"rho must be in [{MIN_RHO:g}, 1], got {rho}")
    log_sq = _log_squared_moments(rho, D) if D >= 4 else None
    per_degree = [DegreeContribution(0, 1.0, 1.0, 1.0, 0.0)]
    log_contribs = [0.0]
    underflowed = False
    for d in range(2, D + 1, 2):
        log_sphere = log_sphere_moment(n, d)
        log_alpha = _logsumexp(
            [
                _log_binomial(N, m) + _log_composition_sum(log_sq, d, m)
                for m in range(1, min(d // 4, N) + 1)
            ]
        )
        log_contrib = log_sphere + log_alpha
        contrib = math.exp(log_contrib) if log_contrib > -math.inf else 0.0
        if contrib == 0.0 and log_contrib > -math.inf:
            underflowed = True
        per_degree.append(
            DegreeContribution(
                d,
                math.exp(log_sphere),
                math.exp(log_alpha) if log_alpha > -math.inf else 0.0,
                contrib,
                log_contrib,
            )
        )
        log_contribs.append(log_contrib)
    log_adv_sq = _logsumexp(log_contribs)
    return AdvantageBreakdown(
        N=N,
        n=n,
        rho=rho,
        D=D,
        per_degree=per_degree,
        adv_squared=math.exp(log_adv_sq),
        adv=math.exp(0.5 * log_adv_sq),
        log_adv_squared=log_adv_sq,
        underflowed=underflowed,
    )


def advantage_bruteforce(N: int, n: int, rho: float, D: int) -> float:
    """Direct enumeration of adv^2 over every multi-index alpha in N^N with
    |alpha| <= D.  Independent oracle for `advantage`; tiny parameters only."""
    if N > 5 or D > 12:
        raise ValueError(f"brute force is guarded to N <= 5 and D <= 12, got N={N}, D={D}")
    if N < 1 or n < 1 or D < 0:
        raise ValueError(f"need N, n >= 1 and D >= 0, got N={N}, n={n}, D={D}")
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    ev = HermiteEvaluator(max(D, 1))
    sq = np.array([hermite_moment_br(k, rho, ev) for k in range(D + 1)]) ** 2
    sphere = np.array([sphere_moment(n, d) for d in range(D + 1)])
    grids = np.stack(np.meshgrid(*([np.arange(D + 1)] * N), indexing="ij"))
    alphas = grids.reshape(N, -1)
    degrees = alphas.sum(axis=0)
    keep = degrees <= D
    products = np.prod(sq[alphas[:, keep]], axis=0)
    return float(np.sum(sphere[degrees[keep]] * products))


def count_admissible(N: int, d: int, m: int) -> int:
    """|A(d, m)|: multi-indices in N^N with total degree d, support size m,
    and every nonzero entry even and >= 4.  Exact integer count."""

    @lru_cache(maxsize=None)
    def comps(rem: int, parts: int) -> int:
        if parts == 0:
            return 1 if rem == 0 else 0
        return sum(
            comps(rem - a, parts - 1) for a in range(4, rem - 4 * (parts - 1) + 1, 2)
        )

    if m > N:
        return 0
    return math.comb(N, m) * comps(d, m)
