"""
Command line interface.

    skewlift gen --seed 1 --size-x 3 --size-y 2 --output inst.json
    skewlift verify inst.json --checks t2,p3,t3
    skewlift campaign --seed 1 --count 50 --jobs 4 --output campaign.txt
    skewlift report campaign.txt --format csv --output campaign.csv

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
and input errors.
"""

import argparse
import sys
from typing import List, Optional, Sequence

from .checks import CHECK_ORDER, CheckPlanner, campaign_specs, run_campaign, run_checks
from .generate import PROCESS_KINDS, InstanceGenerator
from .instance_loader import InstanceLoader
from .output import load_report, save_dataframe, save_report
from .reports import CampaignReport
from .schemas import InstanceSpec, default_config

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="Seed of every random draw")
    parser.add_argument("--size-x", type=int, default=3, help="Number of points of X")
    parser.add_argument("--size-y", type=int, default=2, help="Number of points of Y")
    parser.add_argument(
        "--null-rate", type=float, default=0.0, help="Probability of zeroing a point weight"
    )
    parser.add_argument(
        "--coarse-b-rate", type=float, default=0.0, help="Probability of merging 𝔅-atoms"
    )
    parser.add_argument(
        "--coarse-a-rate", type=float, default=0.0, help="Probability of merging 𝔄-atoms"
    )
    parser.add_argument(
        "--gens-length",
        type=int,
        default=None,
        help="Random generators of 𝔠 placed before its atoms",
    )


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--checks",
        default="all",
        help=f"Comma separated subset of {','.join(CHECK_ORDER)} (default: all)",
    )
    parser.add_argument("--trace", action="store_true", help="Record construction traces")
    parser.add_argument("--timing", action="store_true", help="Include timing in the report")
    parser.add_argument("--output", default=None, help="Report file (default: stdout)")
    parser.add_argument("--quiet", action="store_true", help="Suppress status lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlift",
        description="Finite-model workbench for liftings of skew products.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a seeded instance file")
    _add_spec_arguments(gen)
    gen.add_argument(
        "--process", choices=PROCESS_KINDS, default=None, help="Attach a random process"
    )
    gen.add_argument("--output", default=None, help="Instance file (default: stdout)")
    gen.add_argument("--quiet", action="store_true", help="Suppress status lines")

    verify = commands.add_parser("verify", help="Run checks on an instance file")
    verify.add_argument("instance", help="Instance file (.json, .yml, .yaml)")
    _add_run_arguments(verify)

    campaign = commands.add_parser("campaign", help="Generate and verify consecutive seeds")
    _add_spec_arguments(campaign)
    campaign.add_argument("--count", type=int, default=1, help="Number of instances")
    campaign.add_argument("--jobs", type=int, default=1, help="Worker processes")
    _add_run_arguments(campaign)

    report = commands.add_parser("report", help="Re-render a saved report")
    report.add_argument("report", help="Report file written by verify or campaign")
    report.add_argument(
        "--format",
        choices=("summary", "text", "csv", "json"),
        default="summary",
        help="Output form (default: summary)",
    )
    report.add_argument("--output", default=None, help="Table file for csv/json")
    report.add_argument("--quiet", action="store_true", help="Suppress status lines")
    return parser


class _Status:
    """[INFO]/[OK]/[WARNING]/[ERROR] lines; on stderr when stdout carries the payload."""

    def __init__(self, quiet: bool, payload_on_stdout: bool):
        self.quiet = quiet
        self.stream = sys.stderr if payload_on_stdout else sys.stdout

    def __call__(self, level: str, message: str) -> None:
        if self.quiet and level in ("INFO", "OK"):
            return
        print(f"[{level}] {message}", file=self.stream)


def _spec_from_args(args: argparse.Namespace) -> InstanceSpec:
    return InstanceSpec(
        seed=args.seed,
        size_x=args.size_x,
        size_y=args.size_y,
        null_rate=args.null_rate,
        coarse_b_rate=args.coarse_b_rate,
        coarse_a_rate=args.coarse_a_rate,
        gens_length=args.gens_length,
    )


def _checks_from_args(args: argparse.Namespace) -> List[str]:
    return CheckPlanner.parse(args.checks.split(","))


def _emit(report: CampaignReport, args: argparse.Namespace, status: _Status) -> int:
    if args.output:
        save_report(report, args.output, timing=args.timing, quiet=args.quiet)
    else:
        sys.stdout.write(report.render(timing=args.timing, traces=args.trace))
    if not args.quiet:
        print(report.summary(), file=status.stream)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_gen(args: argparse.Namespace) -> int:
    status = _Status(args.quiet, args.output is None)
    spec = _spec_from_args(args)
    generator = InstanceGenerator(default_config())
    instance = generator.generate(spec)
    if args.process:
        instance.process = generator.process(instance, args.process, spec.seed)
    loader = InstanceLoader()
    if args.output:
        loader.save(instance, args.output)
        status("OK", f"Successfully wrote instance {instance.name} to {args.output}")
    else:
        sys.stdout.write(loader.dumps(instance))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    status = _Status(args.quiet, args.output is None)
    checks = _checks_from_args(args)
    instance = InstanceLoader().load(args.instance)
    status("INFO", f"Verifying {instance.name} with checks {','.join(checks)}")
    report = CampaignReport(run_checks(instance, checks, default_config(), args.trace))
    return _emit(report, args, status)


def cmd_campaign(args: argparse.Namespace) -> int:
    status = _Status(args.quiet, args.output is None)
    if args.jobs < 1:
        raise ValueError(f"--jobs must be at least 1, got {args.jobs}")
    checks = _checks_from_args(args)
    base = _spec_from_args(args)
    specs = campaign_specs(base, args.count)
    status("INFO", f"Running {len(specs)} instances on {args.jobs} worker(s)")
    report = run_campaign(specs, checks, args.jobs, default_config(), args.trace)
    return _emit(report, args, status)


def cmd_report(args: argparse.Namespace) -> int:
    status = _Status(args.quiet, args.output is None)
    report = load_report(args.report)
    if args.format == "summary":
        print(report.summary())
    elif args.format == "text":
        sys.stdout.write(report.render(timing=True))
    else:
        df = report.to_dataframe(timing=True)
        if args.output:
            save_dataframe(df, args.output, format=args.format, quiet=args.quiet)
        elif args.format == "csv":
            sys.stdout.write(df.to_csv(index=False))
        else:
            sys.stdout.write(df.to_json(orient="records", force_ascii=False) + "\n")
    if not report.records:
        status("WARNING", f"{args.report} holds no records")
    return EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "campaign": cmd_campaign,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ValueError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
