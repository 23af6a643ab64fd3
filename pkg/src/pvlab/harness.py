"""Seeded parameter sweeps over (N, n, rho) grids with CSV emission.

Each (cell, trial) unit draws its randomness from a stream index derived by a
stable 64-bit hash of (N, n, rho, trial), so editing the grid never reshuffles
the randomness of unrelated cells, and records come out in deterministic cell
order no matter how many workers ran them.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .model_gen import (
    DegenerateDrawError,
    SeedSpec,
    sample_detection_pair,
    sample_rotated_instance,
    sample_orthonormal_instance,
)
from .spectral import (
    estimate_direction,
    recover_gaussian_rule,
    recover_orthonormal_rule,
    score,
)
from .detection import detect_via_estimation, spectral_norm_test
from .lowdeg import advantage

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "CellSummary",
    "CSV_HEADER",
    "TASKS",
    "stream_for_cell",
    "run_sweep",
    "records_to_csv",
    "summarize",
]

log = logging.getLogger("pvlab")

TASKS = ("recover", "detect_spectral", "detect_l1l2", "advantage")

CSV_HEADER = "N,n,rho,trial,task,success,l2_error,entrywise_err,statistic,adv,elapsed_ms"


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition for a sweep; see SweepConfig.from_json for the file
    format."""

    Ns: list[int]
    ns: list[int]
    rhos: list[float]
    trials: int = 10
    model: str = "gaussian"
    tasks: tuple[str, ...] = ("recover",)
    D: int = 8
    seed: int = 0
    out: str | None = None
    c1: float = 0.05
    collect_timing: bool = False

    def __post_init__(self):
        if not self.Ns or not self.ns or not self.rhos:
            raise ValueError("Ns, ns, and rhos must all be nonempty")
        if any(N < 1 for N in self.Ns) or any(n < 1 for n in self.ns):
            raise ValueError("grid values must be positive")
        if any(not 0 < r <= 1 for r in self.rhos):
            raise ValueError("rho values must be in (0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.model not in ("gaussian", "orth"):
            raise ValueError(f"model must be 'gaussian' or 'orth', got {self.model!r}")
        unknown = set(self.tasks) - set(TASKS)
        if unknown:
            raise ValueError(f"unknown tasks: {sorted(unknown)}")

    @staticmethod
    def from_json(path: str) -> "SweepConfig":
        with open(path) as f:
            raw = json.load(f)
        known = {"Ns", "ns", "rhos", "trials", "model", "tasks", "D", "seed", "out"}
        extra = set(raw) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        missing = {"Ns", "ns", "rhos"} - set(raw)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        kwargs = dict(raw)
        if "tasks" in kwargs:
            kwargs["tasks"] = tuple(kwargs["tasks"])
        return SweepConfig(**kwargs)

    def cells(self) -> list[tuple[int, int, float]]:
        """Valid grid cells in deterministic order; invalid (n > N) cells are
        skipped and logged."""
        out = []
        for N in self.Ns:
            for n in self.ns:
                for rho in self.rhos:
                    if n > N:
                        log.warning("skipping invalid cell N=%d n=%d (n > N)", N, n)
                        continue
                    out.append((N, n, rho))
        return out


@dataclass(frozen=True)
class SweepRecord:
    """One (cell, trial, task) result row."""

    N: int
    n: int
    rho: float
    trial: int
    task: str
    success: bool
    l2_error: float | None = None
    entrywise_max_weighted: float | None = None
    statistic_value: float | None = None
    adv: float | None = None
    elapsed_ms: float | None = None


def stream_for_cell(N: int, n: int, rho: float, trial: int) -> int:
    """Stable 64-bit stream index for a (cell, trial) unit.

    rho enters as fixed-point nanounits so float formatting cannot shift the
    hash between platforms.
    """
    rho_fp = round(rho * 1_000_000_000)
    payload = f"{N},{n},{rho_fp},{trial}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def _run_unit(args: tuple) -> list[SweepRecord]:
    """Execute all tasks for one (cell, trial) unit; never raises."""
    config, N, n, rho, trial = args
    seed = SeedSpec(config.seed, stream_for_cell(N, n, rho, trial))
    records = []
    for task in config.tasks:
        start = time.perf_counter()
        try:
            records.append(_run_task(config, N, n, rho, trial, task, seed, start))
        except (DegenerateDrawError, ValueError) as exc:
            log.warning(
                "cell N=%d n=%d rho=%g trial=%d task=%s failed: %s",
                N, n, rho, trial, task, exc,
            )
            records.append(
                SweepRecord(N, n, rho, trial, task, success=False,
                            elapsed_ms=_elapsed(config, start))
            )
    return records


def _elapsed(config: SweepConfig, start: float) -> float | None:
    if not config.collect_timing:
        return None
    return (time.perf_counter() - start) * 1000.0


def _run_task(
    config: SweepConfig,
    N: int,
    n: int,
    rho: float,
    trial: int,
    task: str,
    seed: SeedSpec,
    start: float,
) -> SweepRecord:
    if task == "recover":
        if config.model == "orth":
            obs = sample_orthonormal_instance(N, n, rho, seed)
        else:
            obs = sample_rotated_instance(N, n, rho, seed)
        result = estimate_direction(obs)
        if config.model == "orth":
            recovery = recover_orthonormal_rule(result.raw_estimate)
        else:
            recovery = recover_gaussian_rule(result.raw_estimate, rho)
        report = score(result.raw_estimate, obs.truth, recovery)
        return SweepRecord(
            N, n, rho, trial, task,
            success=bool(report.exact_match),
            l2_error=report.l2_error,
            entrywise_max_weighted=report.entrywise_max_weighted,
            statistic_value=result.leading_value,
            elapsed_ms=_elapsed(config, start),
        )
    if task in ("detect_spectral", "detect_l1l2"):
        null_obs = sample_detection_pair(N, n, rho, seed, "null")
        planted_obs = sample_detection_pair(N, n, rho, seed, "planted")
        if task == "detect_spectral":
            null_out = spectral_norm_test(null_obs, rho, config.c1)
            planted_out = spectral_norm_test(planted_obs, rho, config.c1)
        else:
            null_out = detect_via_estimation(null_obs, config.c1)
            planted_out = detect_via_estimation(planted_obs, config.c1)
        return SweepRecord(
            N, n, rho, trial, task,
            success=(null_out.decision == "null" and planted_out.decision == "planted"),
            statistic_value=planted_out.statistic_value,
            elapsed_ms=_elapsed(config, start),
        )
    if task == "advantage":
        breakdown = advantage(N, n, rho, config.D)
        return SweepRecord(
            N, n, rho, trial, task,
            success=True,
            adv=breakdown.adv,
            elapsed_ms=_elapsed(config, start),
        )
    raise ValueError(f"unknown task {task!r}")


def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRecord]:
    """Run every (cell, trial, task) unit and return records in deterministic
    cell order, independent of worker count.

    Per-unit failures (e.g. degenerate draws) are logged and recorded with
    success=False; they never abort the sweep.
    """
    units = [
        (config, N, n, rho, trial)
        for (N, n, rho) in config.cells()
        for trial in range(config.trials)
    ]
    if workers <= 1:
        batches = [_run_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_unit, units, chunksize=8))
    return [record for batch in batches for record in batch]


def _format_value(x: float | None) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return repr(x)
    return repr(float(x))


def records_to_csv(records: list[SweepRecord]) -> str:
    """Render records under the fixed header; None fields are left empty."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.N),
                    str(r.n),
                    repr(float(r.rho)),
                    str(r.trial),
                    r.task,
                    "1" if r.success else "0",
                    _format_value(r.l2_error),
                    _format_value(r.entrywise_max_weighted),
                    _format_value(r.statistic_value),
                    _format_value(r.adv),
                    _format_value(r.elapsed_ms),
                ]
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CellSummary:
    """Per-cell aggregate over trials."""

    N: int
    n: int
    rho: float
    task: str
    trials: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    mean_l2: float | None
    se_l2: float | None
    mean_entrywise: float | None


def _wilson(successes: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return center - half, center + half


def summarize(records: list[SweepRecord]) -> list[CellSummary]:
    """Group records by (N, n, rho, task): success rates with Wilson 95%
    intervals plus mean errors and their standard errors."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[SweepRecord]] = {}
    order = []
    for r in records:
        key = (r.N, r.n, r.rho, r.task)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    out = []
    for key in order:
        rows = groups[key]
        total = len(rows)
        wins = sum(1 for r in rows if r.success)
        low, high = _wilson(wins, total)
        l2s = [r.l2_error for r in rows if r.l2_error is not None]
        ews = [r.entrywise_max_weighted for r in rows if r.entrywise_max_weighted is not None]
        mean_l2 = sum(l2s) / len(l2s) if l2s else None
        se_l2 = None
        if len(l2s) > 1:
            var = sum((x - mean_l2) ** 2 for x in l2s) / (len(l2s) - 1)
            se_l2 = math.sqrt(var / len(l2s))
        out.append(
            CellSummary(
                N=key[0], n=key[1], rho=key[2], task=key[3],
                trials=total,
                success_rate=wins / total,
                wilson_low=low,
                wilson_high=high,
                mean_l2=mean_l2,
                se_l2=se_l2,
                mean_entrywise=sum(ews) / len(ews) if ews else None,
            )
        )
    return out
