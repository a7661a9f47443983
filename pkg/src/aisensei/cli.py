"""Command-line entry points.

    aisensei experiment run --config cfg.json [--mode replay|live] [--out DIR]
    aisensei experiment report --report out/report.json --format text|csv|json [--out DIR]
    aisensei kappa --ratings ratings.csv --method pairwise|fleiss
    aisensei serve --config service.json [--host HOST] [--port PORT]

Exit codes: 0 success, 2 configuration problems, 3 provider failures.
"""

from __future__ import annotations

import argparse
import sys

from . import eval_metrics, experiment_runner
from .kgraph import CycleError, DanglingEdgeError, ParseError
from .llm_gateway import AuthError, CassetteMissError, ProviderError
from .student_model import InvalidOverrideError, ThresholdError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROVIDER = 3

_CONFIG_ERRORS = (
    experiment_runner.ExperimentError,
    ParseError,
    CycleError,
    DanglingEdgeError,
    InvalidOverrideError,
    ThresholdError,
    eval_metrics.LengthMismatchError,
    FileNotFoundError,
    KeyError,
    ValueError,
)
_PROVIDER_ERRORS = (ProviderError, AuthError, CassetteMissError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aisensei")
    sub = parser.add_subparsers(dest="command", required=True)

    experiment = sub.add_parser("experiment", help="run or re-render the feedback experiment")
    exp_sub = experiment.add_subparsers(dest="subcommand", required=True)

    run = exp_sub.add_parser("run", help="generate feedback per (band, profile) and score the tables")
    run.add_argument("--config", required=True, help="experiment config JSON")
    run.add_argument("--mode", choices=["live", "replay"], help="override the config's gateway mode")
    run.add_argument("--out", help="override the config's output directory")

    report = exp_sub.add_parser("report", help="re-render a saved report.json")
    report.add_argument("--report", required=True, help="path to report.json")
    report.add_argument("--format", default="text", choices=["text", "csv", "json"])
    report.add_argument("--out", default=".", help="directory for rendered files")

    kappa = sub.add_parser("kappa", help="inter-rater agreement per question band")
    kappa.add_argument("--ratings", required=True, help="CSV with rater_id,band,profile,metric,value")
    kappa.add_argument("--method", default="pairwise", choices=["pairwise", "fleiss"])

    serve = sub.add_parser("serve", help="host the tutoring service HTTP API")
    serve.add_argument("--config", required=True, help="service config JSON")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def cmd_experiment_run(args) -> int:
    cfg = experiment_runner.ExperimentConfig.from_file(args.config)
    if args.mode:
        cfg.mode = args.mode
    if args.out:
        from pathlib import Path

        cfg.output_dir = Path(args.out)
    report = experiment_runner.run_experiment(cfg)
    written = []
    for fmt in ("json", "text", "csv"):
        written.extend(experiment_runner.render_report(report, fmt, cfg.output_dir))
    print(f"report hash: {experiment_runner.report_hash(report)}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_experiment_report(args) -> int:
    report_dict = experiment_runner.load_report(args.report)
    written = experiment_runner.render_report_dict(report_dict, args.format, args.out)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_kappa(args) -> int:
    records = eval_metrics.load_ratings_csv(args.ratings)
    method = (
        eval_metrics.KappaMethod.PairwiseMeanCohen
        if args.method == "pairwise"
        else eval_metrics.KappaMethod.Fleiss
    )
    print("band,kappa")
    for band, value in eval_metrics.kappa_by_band(records, method=method).items():
        print(f"{band.value},{value:.4f}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .http_api import create_app
    from .tutor_service import ServiceConfig, build_service

    service = build_service(ServiceConfig.from_file(args.config))
    uvicorn.run(create_app(service), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "experiment" and args.subcommand == "run":
            return cmd_experiment_run(args)
        if args.command == "experiment" and args.subcommand == "report":
            return cmd_experiment_report(args)
        if args.command == "kappa":
            return cmd_kappa(args)
        if args.command == "serve":
            return cmd_serve(args)
        return EXIT_CONFIG
    except _PROVIDER_ERRORS as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
