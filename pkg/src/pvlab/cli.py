"""Command-line interface: pvlab gen | estimate | detect | advantage | sweep."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import harness
from .detection import DEFAULT_C1, error_rates, plugin_rho
from .lowdeg import advantage
from .model_gen import (
    SeedSpec,
    dump_instance,
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

CONFIG_ERROR_EXIT = 2


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, required=True, help="ambient dimension")
    p.add_argument("--n", type=int, required=True, help="subspace dimension")
    p.add_argument("--rho", type=float, required=True, help="sparsity in (0, 1]")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--stream", type=int, default=0, help="stream index (trial number)")


def _sample_observation(args, model: str):
    seed = SeedSpec(args.seed, args.stream)
    if model == "gaussian":
        return sample_rotated_instance(args.N, args.n, args.rho, seed)
    if model == "orth":
        return sample_orthonormal_instance(args.N, args.n, args.rho, seed)
    if model == "null":
        return sample_detection_pair(args.N, args.n, args.rho, seed, "null")
    raise ValueError(f"unknown model {model!r}")


def _cmd_gen(args) -> int:
    obs = _sample_observation(args, args.model)
    seed = SeedSpec(args.seed, args.stream)
    if args.out:
        with open(args.out, "w") as f:
            dump_instance(obs, args.rho, seed, f)
    else:
        dump_instance(obs, args.rho, seed, sys.stdout)
    return 0


def _cmd_estimate(args) -> int:
    obs = _sample_observation(args, args.model)
    result = estimate_direction(obs, centered=not args.uncentered)
    if args.model == "orth":
        recovery = recover_orthonormal_rule(result.raw_estimate)
    else:
        recovery = recover_gaussian_rule(result.raw_estimate, args.rho)
    report = score(result.raw_estimate, obs.truth, recovery)
    print(
        f"lambda={result.leading_value:.6e} gap={result.gap:.6e} "
        f"l2_error={report.l2_error:.6e} "
        f"entrywise_max_weighted={report.entrywise_max_weighted:.6e} "
        f"exact_match={int(bool(report.exact_match))}"
    )
    if args.dump_estimate:
        with open(args.dump_estimate, "w") as f:
            f.write("\n".join(repr(float(x)) for x in result.raw_estimate) + "\n")
    return 0


def _cmd_detect(args) -> int:
    rho = args.rho
    if args.plugin_rho:
        probe = sample_detection_pair(args.N, args.n, rho, SeedSpec(args.seed), "planted")
        est = estimate_direction(probe)
        rho = max(plugin_rho(est.raw_estimate), 1.0 / args.N)
        print(f"# plug-in rho estimate: {rho:.6g}", file=sys.stderr)
    report = error_rates(
        args.N, args.n, rho, args.c1, args.trials, args.test, SeedSpec(args.seed)
    )
    print(
        f"N={args.N} n={args.n} rho={args.rho} c1={args.c1} test={args.test} "
        f"trials={report.trials} type_I={report.type_I:.4f} type_II={report.type_II:.4f}"
    )
    if args.csv:
        row = (
            f"{args.N},{args.n},{args.rho!r},{args.c1!r},{args.test},"
            f"{report.trials},{report.type_I!r},{report.type_II!r}\n"
        )
        with open(args.csv, "a") as f:
            f.write(row)
    return 0


def _cmd_advantage(args) -> int:
    breakdown = advantage(args.N, args.n, args.rho, args.D)
    print(f"adv={breakdown.adv:.12g} adv_squared={breakdown.adv_squared:.12g}")
    if args.breakdown:
        print("d,sphere_moment,alpha_sum,contribution")
        for row in breakdown.per_degree:
            print(f"{row.d},{row.sphere_moment!r},{row.alpha_sum!r},{row.contribution!r}")
    return 0


def _cmd_sweep(args) -> int:
    try:
        config = harness.SweepConfig.from_json(args.config)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR_EXIT
    if args.timing:
        config = dataclasses.replace(config, collect_timing=True)
    records = harness.run_sweep(config, workers=args.workers)
    csv_text = harness.records_to_csv(records)
    if config.out:
        with open(config.out, "w") as f:
            f.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.summary:
        for cell in harness.summarize(records):
            print(
                f"N={cell.N} n={cell.n} rho={cell.rho} task={cell.task} "
                f"rate={cell.success_rate:.3f} "
                f"wilson95=[{cell.wilson_low:.3f},{cell.wilson_high:.3f}]",
                file=sys.stderr,
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvlab",
        description="Planted vector in a random subspace: generation, spectral "
        "recovery, detection tests, and exact low-degree advantage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance and dump it as CSV")
    _add_instance_flags(p)
    p.add_argument("--model", choices=["gaussian", "orth", "null"], default="gaussian")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("estimate", help="run the spectral estimator on a fresh instance")
    _add_instance_flags(p)
    p.add_argument("--model", choices=["gaussian", "orth"], default="gaussian")
    p.add_argument("--uncentered", action="store_true",
                   help="drop the -(3/N) I centering term (comparison variant)")
    p.add_argument("--dump-estimate", default=None, help="write the raw estimate as CSV")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("detect", help="estimate detection error rates")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--c1", type=float, default=DEFAULT_C1)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--test", choices=["spectral", "l1l2", "reduction"], default="spectral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="append a result row to this CSV file")
    p.add_argument("--plugin-rho", action="store_true",
                   help="exploration only: estimate rho from a probe instance")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("advantage", help="exact degree-D advantage")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--breakdown", action="store_true", help="print per-degree CSV")
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("sweep", help="run a (N, n, rho) grid sweep from a JSON config")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", action="store_true", help="print per-cell summary to stderr")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock per unit (breaks byte-reproducibility)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
