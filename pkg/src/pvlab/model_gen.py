"""Seeded generation of planted vectors, subspace bases, and detection instances.

Two observation models are supported.  In the "gaussian" model the observed
matrix is Y @ Q where the first column of Y is the planted vector v, the other
columns are i.i.d. N(0, I_N / N), and Q is orthogonal.  In the "orthonormal"
model the observation is an orthonormal basis of the column span of Y.  The
null model for detection is an N x n matrix of i.i.d. N(0, 1/N) entries.

All sampling is a pure function of (parameters, SeedSpec): same inputs give
bit-identical outputs, and distinct stream indices give independent draws.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateDrawError",
    "RankDeficientError",
    "SeedSpec",
    "PlantedVector",
    "BasisMatrix",
    "RotationMatrix",
    "sample_br_vector",
    "sample_gaussian_basis",
    "sample_haar_rotation",
    "apply_rotation",
    "orthonormalize",
    "sample_detection_pair",
    "sample_rotated_instance",
    "sample_orthonormal_instance",
    "dump_instance",
    "load_instance",
]

# Gaussian bases with n <= N/2 are far from singular; a smaller R diagonal
# indicates a caller bug, not bad luck.
RANK_TOL = 1e-8

# Substream lanes used by the composite samplers, so that e.g. the planted
# vector and the Gaussian columns never share random bits.
_LANE_NULL = 0
_LANE_VECTOR = 1
_LANE_ROTATION = 2
_LANE_BASIS = 3


class DegenerateDrawError(ValueError):
    """A sampled vector was identically zero and cannot be normalized."""


class RankDeficientError(ValueError):
    """A basis to orthonormalize was numerically rank-deficient."""

    def __init__(self, column: int, diag: float):
        self.column = column
        self.diag = diag
        super().__init__(
            f"rank-deficient basis: |R[{column},{column}]| = {diag:.3e} <= {RANK_TOL:g}"
        )


@dataclass(frozen=True)
class SeedSpec:
    """Reproducible RNG stream identity: (master_seed, stream_index).

    Each (master_seed, stream_index) pair deterministically keys a
    counter-based Philox generator, so trials can run in parallel on distinct
    stream indices without shared state.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self, *lane: int) -> np.random.Generator:
        """Generator for this stream; extra `lane` ints split off independent
        substreams used by composite samplers."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_index, *lane)
        )
        return np.random.Generator(np.random.Philox(seq))

    @staticmethod
    def coerce(seed: "SeedSpec | int | tuple[int, int]") -> "SeedSpec":
        if isinstance(seed, SeedSpec):
            return seed
        if isinstance(seed, tuple):
            return SeedSpec(int(seed[0]), int(seed[1]))
        return SeedSpec(int(seed))


@dataclass(frozen=True)
class PlantedVector:
    """A Bernoulli-Rademacher planted vector.

    Unnormalized entries are 0 or exactly +-1/sqrt(N*rho); when `normalized`
    the entries were divided by the realized l2 norm, so the vector is unit.
    """

    entries: np.ndarray
    rho: float
    normalized: bool = False
    support_size: int = 0

    @property
    def size(self) -> int:
        return self.entries.size


@dataclass(frozen=True)
class BasisMatrix:
    """An N x n observation matrix plus its provenance.

    kind is one of "gaussian_planted" (first column is the planted vector),
    "rotated" (right-multiplied by an orthogonal matrix), "orthonormal"
    (columns orthonormal), or "null" (pure Gaussian noise).  `truth` carries
    the planted vector for harness scoring; it is None for null draws.
    """

    data: np.ndarray
    kind: str
    truth: PlantedVector | None = field(default=None, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass(frozen=True)
class RotationMatrix:
    """An n x n real orthogonal matrix."""

    data: np.ndarray

    @property
    def dim(self) -> int:
        return self.data.shape[0]


def _br_from_rng(
    rng: np.random.Generator, N: int, rho: float, normalize: bool
) -> PlantedVector:
    u = rng.random(N)
    magnitude = 1.0 / np.sqrt(N * rho)
    entries = np.zeros(N)
    entries[u >= 1.0 - rho / 2.0] = magnitude
    entries[(u >= 1.0 - rho) & (u < 1.0 - rho / 2.0)] = -magnitude
    support = int(np.count_nonzero(entries))
    if normalize:
        norm = np.linalg.norm(entries)
        if norm == 0.0:
            raise DegenerateDrawError(
                f"all {N} entries were zero (rho={rho}); retry with another stream"
            )
        entries = entries / norm
    return PlantedVector(entries, rho, normalized=normalize, support_size=support)


def _basis_from_rng(
    rng: np.random.Generator, v: PlantedVector, n: int
) -> BasisMatrix:
    N = v.size
    Y = np.empty((N, n))
    Y[:, 0] = v.entries
    if n > 1:
        Y[:, 1:] = rng.normal(scale=1.0 / np.sqrt(N), size=(N, n - 1))
    return BasisMatrix(Y, "gaussian_planted", truth=v)


def _haar_from_rng(rng: np.random.Generator, n: int) -> RotationMatrix:
    G = rng.normal(size=(n, n))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0.0] = 1.0
    return RotationMatrix(Q * signs)


def sample_br_vector(
    N: int,
    rho: float,
    seed: SeedSpec | int,
    normalize: bool = False,
) -> PlantedVector:
    """Draw a Bernoulli-Rademacher vector: each entry independently 0 with
    probability 1-rho and +-1/sqrt(N*rho) with probability rho/2 each.

    With `normalize`, the vector is divided by its realized l2 norm; an
    all-zero draw then raises DegenerateDrawError so the caller can retry on
    the next stream.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    rng = SeedSpec.coerce(seed).generator()
    return _br_from_rng(rng, N, rho, normalize)


def sample_gaussian_basis(
    v: PlantedVector, n: int, seed: SeedSpec | int
) -> BasisMatrix:
    """Matrix whose first column is v and whose other n-1 columns are i.i.d.
    N(0, I_N / N) vectors."""
    if not 1 <= n <= v.size:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={v.size}")
    rng = SeedSpec.coerce(seed).generator()
    return _basis_from_rng(rng, v, n)


def sample_haar_rotation(n: int, seed: SeedSpec | int) -> RotationMatrix:
    """Haar-distributed orthogonal matrix via QR of a Gaussian matrix with the
    diagonal of R forced positive (the sign fix makes the measure exact)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = SeedSpec.coerce(seed).generator()
    return _haar_from_rng(rng, n)


def apply_rotation(Y: BasisMatrix, Q: RotationMatrix) -> BasisMatrix:
    """Right-multiply the basis by Q; the column span is unchanged."""
    if Y.data.shape[1] != Q.dim:
        raise ValueError(
            f"basis has {Y.data.shape[1]} columns but rotation is {Q.dim} x {Q.dim}"
        )
    return BasisMatrix(Y.data @ Q.data, "rotated", truth=Y.truth)


def orthonormalize(Y: BasisMatrix) -> BasisMatrix:
    """Orthonormal basis of the column span of Y, via Householder QR.

    Raises RankDeficientError (with the offending column index) when a
    diagonal entry of R falls below the rank tolerance.
    """
    Q, R = np.linalg.qr(Y.data)
    diag = np.abs(np.diag(R))
    small = np.flatnonzero(diag <= RANK_TOL)
    if small.size:
        j = int(small[0])
        raise RankDeficientError(column=j, diag=float(diag[j]))
    signs = np.sign(np.diag(R))
    return BasisMatrix(Q * signs, "orthonormal", truth=Y.truth)


def sample_detection_pair(
    N: int,
    n: int,
    rho: float,
    seed: SeedSpec | int,
    which: str,
) -> BasisMatrix:
    """One detection instance: "null" gives i.i.d. N(0, 1/N) entries, "planted"
    gives Y @ Q with v ~ BR(N, rho) and Haar Q (ground truth attached)."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    spec = SeedSpec.coerce(seed)
    if which == "null":
        rng = spec.generator(_LANE_NULL)
        data = rng.normal(scale=1.0 / np.sqrt(N), size=(N, n))
        return BasisMatrix(data, "null", truth=None)
    if which == "planted":
        return sample_rotated_instance(N, n, rho, spec)
    raise ValueError(f"which must be 'null' or 'planted', got {which!r}")


def sample_rotated_instance(
    N: int,
    n: int,
    rho: float,
    seed: SeedSpec | int,
    normalize: bool = False,
) -> BasisMatrix:
    """Gaussian-basis observation Y @ Q with v ~ BR(N, rho) and Haar Q."""
    spec = SeedSpec.coerce(seed)
    v = _br_from_rng(spec.generator(_LANE_VECTOR), N, rho, normalize)
    Y = _basis_from_rng(spec.generator(_LANE_BASIS), v, n)
    Q = _haar_from_rng(spec.generator(_LANE_ROTATION), n)
    return apply_rotation(Y, Q)


def sample_orthonormal_instance(
    N: int,
    n: int,
    rho: float,
    seed: SeedSpec | int,
    extra_rotation: bool = False,
) -> BasisMatrix:
    """Orthonormal-basis observation for a unit planted vector v'/||v'||,
    v' ~ BR(N, rho).

    `extra_rotation` right-multiplies the QR output by a Haar rotation to
    emulate an arbitrary orthonormal basis of the same span; the estimator is
    invariant to this choice.
    """
    spec = SeedSpec.coerce(seed)
    v = _br_from_rng(spec.generator(_LANE_VECTOR), N, rho, normalize=True)
    Y = _basis_from_rng(spec.generator(_LANE_BASIS), v, n)
    Yhat = orthonormalize(Y)
    if extra_rotation:
        Q = _haar_from_rng(spec.generator(_LANE_ROTATION), n)
        Yhat = BasisMatrix(Yhat.data @ Q.data, "orthonormal", truth=v)
    return Yhat


# --- instance serialization (CLI `gen`) ---

_DUMP_HEADER = "N,n,rho,kind,seed,stream"


def dump_instance(
    basis: BasisMatrix,
    rho: float,
    seed: SeedSpec,
    out: io.TextIOBase,
) -> None:
    """Write an instance as CSV: the fixed header line, one metadata line, and
    the matrix rows in row-major order."""
    N, n = basis.data.shape
    out.write(_DUMP_HEADER + "\n")
    out.write(f"{N},{n},{rho!r},{basis.kind},{seed.master_seed},{seed.stream_index}\n")
    for row in basis.data:
        out.write(",".join(repr(float(x)) for x in row) + "\n")


def load_instance(src: io.TextIOBase) -> tuple[BasisMatrix, float, SeedSpec]:
    """Inverse of dump_instance (the truth vector is not serialized)."""
    header = src.readline().strip()
    if header != _DUMP_HEADER:
        raise ValueError(f"bad instance header: {header!r}")
    meta = src.readline().strip().split(",")
    N, n = int(meta[0]), int(meta[1])
    rho = float(meta[2])
    kind = meta[3]
    seed = SeedSpec(int(meta[4]), int(meta[5]))
    data = np.loadtxt(src, delimiter=",", ndmin=2)
    if data.shape != (N, n):
        raise ValueError(f"expected a {N} x {n} matrix, got {data.shape}")
    return BasisMatrix(data, kind), rho, seed
