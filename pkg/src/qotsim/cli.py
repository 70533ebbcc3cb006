"""Command-line interface.

Subcommands: `bounds` (security-bound report), `run` (honest Monte Carlo),
`attack` (adversarial Monte Carlo), `privacy-test` (choice-vector
distinguishability), `oracle` (exact event probability).  Exit code 0 iff
every verdict passes.  QOTSIM_SEED sets the default seed; flags override.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .adversary import STRATEGY_KINDS, Strategy
from .harness import (
    ExperimentConfig,
    all_verdicts_pass,
    check_bounds,
    emit_report,
    exact_failure_oracle,
    privacy_independence_test,
    run_experiment,
)
from .params import build_bound_report, smallest_valid_N, validate_params


def _default_seed() -> int:
    return int(os.environ.get("QOTSIM_SEED", "0"))


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip() != "")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="Alice's bit count")
    p.add_argument("--m", type=int, required=True, help="Bob's choice count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qotsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="report every security bound for (n, m)")
    _add_common(p)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--p", type=float, default=None, help="commitment cheat probability")
    p.add_argument("--format", choices=("structured", "table"), default="structured")

    p = sub.add_parser("run", help="honest Monte Carlo experiment")
    _add_common(p)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--auto-N", type=int, default=None, metavar="FLOOR",
                   help="use the smallest admissible N >= FLOOR")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--bits", type=_csv_ints, default=None)
    p.add_argument("--random-bits", action="store_true")
    p.add_argument("--choices", type=_csv_ints, default=None)
    p.add_argument("--random-choices", action="store_true")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("structured", "table"), default="structured")

    p = sub.add_parser("attack", help="adversarial Monte Carlo experiment")
    _add_common(p)
    p.add_argument("--strategy", choices=[k for k in STRATEGY_KINDS if k != "honest"],
                   required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--strict-alice", action="store_true")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("structured", "table"), default="structured")

    p = sub.add_parser("privacy-test", help="choice-vector distinguishability test")
    _add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials-per-choice", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--leaky", action="store_true",
                   help="run the deliberately leaky positive-control Bob")
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("oracle", help="exact event probability")
    _add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--event", choices=("correctness", "privacy"), required=True)

    return parser


def _write_out(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "bounds":
        report = build_bound_report(args.n, args.m, N=args.N, p=args.p)
        config = {"command": "bounds", "n": args.n, "m": args.m, "N": args.N,
                  "p": args.p, "seed": None}
        text = emit_report(config, extra={"bounds": dataclasses.asdict(report)},
                           fmt=args.format)
        print(text)
        return 0

    if args.command == "run":
        if args.N is not None:
            N = args.N
        elif args.auto_N is not None:
            N = smallest_valid_N(args.n, args.m, args.auto_N)
        else:
            print("error: one of --N or --auto-N is required", file=sys.stderr)
            return 2
        params = validate_params(args.n, args.m, N)
        bits = None if args.random_bits else args.bits
        choices = None if args.random_choices else args.choices
        config = ExperimentConfig(
            n=args.n, m=args.m, N=N, trials=args.trials, seed=args.seed,
            strategy=Strategy("honest"), bits=bits, choices=choices,
        )
        stats = run_experiment(config)
        verdicts = check_bounds(stats, params)
        doc_cfg = {"command": "run", "n": args.n, "m": args.m, "N": N,
                   "trials": args.trials, "seed": args.seed,
                   "bits": list(bits) if bits else None,
                   "choices": list(choices) if choices else None}
        text = emit_report(doc_cfg, stats=stats, verdicts=verdicts, fmt=args.format)
        _write_out(text, args.out)
        return 0 if all_verdicts_pass(verdicts) else 1

    if args.command == "attack":
        params = validate_params(args.n, args.m, args.N)
        strategy = Strategy(args.strategy, p=args.p, strict_alice=args.strict_alice)
        config = ExperimentConfig(
            n=args.n, m=args.m, N=args.N, trials=args.trials, seed=args.seed,
            strategy=strategy,
        )
        stats = run_experiment(config)
        verdicts = check_bounds(stats, params)
        doc_cfg = {"command": "attack", "strategy": args.strategy, "p": args.p,
                   "strict_alice": args.strict_alice, "n": args.n, "m": args.m,
                   "N": args.N, "trials": args.trials, "seed": args.seed}
        text = emit_report(doc_cfg, stats=stats, verdicts=verdicts, fmt=args.format)
        _write_out(text, args.out)
        return 0 if all_verdicts_pass(verdicts) else 1

    if args.command == "privacy-test":
        params = validate_params(args.n, args.m, args.N)
        report = privacy_independence_test(
            params, args.trials_per_choice, args.seed, leaky=args.leaky
        )
        doc_cfg = {"command": "privacy-test", "n": args.n, "m": args.m,
                   "N": args.N, "trials_per_choice": args.trials_per_choice,
                   "seed": args.seed, "leaky": args.leaky}
        text = emit_report(doc_cfg, extra={"independence": report})
        _write_out(text, args.out)
        return 0 if report["all_pass"] else 1

    if args.command == "oracle":
        params = validate_params(args.n, args.m, args.N)
        value = exact_failure_oracle(params, args.event)
        config = {"command": "oracle", "n": args.n, "m": args.m, "N": args.N,
                  "event": args.event, "seed": None}
        text = emit_report(
            config,
            extra={"probability": {"exact": str(value), "float": float(value)}},
        )
        print(text)
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
