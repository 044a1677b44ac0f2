"""Command-line entry point.

Subcommands: ``generate`` (write a synthetic dataset CSV), ``run`` (execute a
sweep and write results), ``bruteforce`` (exhaustive-vs-greedy check on a
tiny instance), ``report`` (aggregate a results CSV).

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 invariant
violation (greedy/optimal ratio below one half).  ``ALSIM_BASE_SEED``
overrides the config's base seed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys

from . import bruteforce as bf
from .data import save_dataset_csv
from .experiment import (
    ConfigError,
    aggregate,
    load_config,
    load_synthetic_spec,
    read_results_csv,
    run_sweep,
    write_aggregate_csv,
    write_curves_csv,
    write_results_csv,
)
from .synthetic import generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3

BASE_SEED_ENV = "ALSIM_BASE_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p_gen.add_argument("--spec", required=True, help="INI config with a [synthetic] section")
    p_gen.add_argument("--out", required=True, help="output dataset CSV path")

    p_run = sub.add_parser("run", help="run a sweep and write the results CSV")
    p_run.add_argument("--config", required=True, help="INI experiment config")
    p_run.add_argument("--out", required=True, help="output results CSV path")
    p_run.add_argument("--curves", help="also write per-query accuracy curves to this CSV")
    p_run.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker processes (default: available processors)")

    p_bf = sub.add_parser("bruteforce", help="exhaustive-vs-greedy verification on a tiny instance")
    p_bf.add_argument("--m", type=int, required=True, help=f"unlabeled pool size (<= {bf.MAX_M})")
    p_bf.add_argument("--budget", type=int, required=True, help=f"query budget (<= {bf.MAX_B})")
    p_bf.add_argument("--seed", type=int, default=0)
    p_bf.add_argument("--retention", type=float, default=0.35,
                      help="retention target at the instance's max lag")
    p_bf.add_argument("--l2-lambda", type=float, default=bf.TINY_CLASSIFIER_PARAMS["l2_lambda"],
                      help="classifier ridge for the tiny instance")

    p_rep = sub.add_parser("report", help="aggregate a results CSV")
    p_rep.add_argument("--results", required=True, help="results CSV from `alsim run`")
    p_rep.add_argument("--out", required=True, help="output aggregate CSV path")

    return parser


def _cmd_generate(args) -> int:
    parser = configparser.ConfigParser()
    try:
        with open(args.spec, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        print(f"alsim generate: {exc}", file=sys.stderr)
        return EXIT_DATA
    spec = load_synthetic_spec(parser)
    if spec is None:
        print(f"alsim generate: {args.spec}: missing [synthetic] section", file=sys.stderr)
        return EXIT_DATA
    pool = generate(spec)
    save_dataset_csv(pool, spec.vocabulary(), args.out)
    print(f"wrote {len(pool)} observations to {args.out}")
    return EXIT_OK


def _print_summary(records) -> None:
    rows = aggregate(records)
    print(f"{'strategy':<10}{'retention':<11}{'budget':>7}{'mean_acc':>10}{'std':>8}{'n':>6}")
    for r in rows:
        print(f"{r.strategy:<10}{r.retention_name:<11}{r.budget:>7}"
              f"{r.mean_accuracy:>10.4f}{r.std_accuracy:>8.4f}{r.n:>6}")


def _cmd_run(args) -> int:
    override = os.environ.get(BASE_SEED_ENV)
    config = load_config(args.config, base_seed_override=int(override) if override else None)
    records, curves = run_sweep(config, jobs=max(args.jobs, 1), collect_curves=bool(args.curves))
    write_results_csv(records, args.out)
    if args.curves:
        write_curves_csv(curves, args.curves)
    _print_summary(records)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_bruteforce(args) -> int:
    train, test, vocab, memory, initial = bf.tiny_instance(
        args.m, args.seed, retention_low=args.retention)
    report = bf.optimal_session(train, test, vocab, memory, args.budget, initial,
                                classifier_params={"l2_lambda": args.l2_lambda})
    print(f"m={report.m} budget={report.budget} sequences={report.count_enumerated}")
    print(f"best objective   {report.best_objective:.6f}  sequence {list(report.best_sequence)}")
    print(f"greedy objective {report.greedy_objective:.6f}  ratio {report.ratio:.4f}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["m", "budget", "count_enumerated", "best_objective",
                     "greedy_objective", "ratio", "best_sequence"])
    writer.writerow([report.m, report.budget, report.count_enumerated,
                     repr(report.best_objective), repr(report.greedy_objective),
                     repr(report.ratio), ";".join(str(i) for i in report.best_sequence)])
    if report.ratio < 0.5:
        print(f"alsim bruteforce: greedy/optimal ratio {report.ratio:.4f} < 0.5", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_report(args) -> int:
    records = read_results_csv(args.results)
    if not records:
        print(f"alsim report: {args.results}: no records", file=sys.stderr)
        return EXIT_DATA
    write_aggregate_csv(aggregate(records), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "bruteforce": _cmd_bruteforce,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"alsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
