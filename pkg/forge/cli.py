import argparse
import logging
import sys
from dataclasses import replace
from forge.config import FatalConfig, load_config
from forge.constants import CustomError
from forge.gateway.backends import BackendDescriptor
from forge.pipeline import load_records, run_pipeline
from forge.reports import aggregate, emit_reports

log = logging.getLogger(__name__)

def buildParser():
    parser = argparse.ArgumentParser(
        prog="legacy-forge",
        description="Generate, run and improve unit tests for legacy C functions.",
    )
    parser.add_argument("--verbose", action="store_true", help="log tool command lines")
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", help="run the pipeline over a codebase")
    run.add_argument("--config", required=True, help="YAML run configuration")
    run.add_argument("--targets", help="glob or comma-separated function names")
    run.add_argument("--max-iter", type=int, help="iterations per target")
    run.add_argument("--backend", help="scripted:<dir> or http")
    run.add_argument("--out", help="output directory")
    run.add_argument("--parallelism", type=int, help="targets processed at once")
    run.add_argument("--annotate", action="store_true", help="insert crash and violation notes into the sources")
    report = commands.add_parser("report", help="recompute reports from session records")
    report.add_argument("--out", required=True, help="output directory of an earlier run")
    return parser

def backendOverride(text, current):
    if text is None:
        return None
    if text == "http":
        return replace(current, kind="http")
    if text.startswith("scripted:"):
        return BackendDescriptor(kind="scripted", script_dir=text[len("scripted:"):])
    raise FatalConfig("--backend must be scripted:<dir> or http, got %s" % text)

def targetsOverride(text):
    if text is None:
        return None
    if "," in text:
        return tuple(name.strip() for name in text.split(",") if name.strip())
    return text

def describe(report):
    lines = [
        "targets: %d (executed %d, coverage measured %d)"
        % (report.n_targets, report.n_executed, report.n_coverage_measured),
        "improved: %d" % report.n_improved,
    ]
    if report.improvement_rate is not None:
        lines.append("improvement rate: %.1f%%" % (100 * report.improvement_rate))
    lines += ["%s: %d" % pair for pair in sorted(report.counters.items())]
    if report.pearson_r is not None:
        lines.append("cycles vs gain: r = %.4f, p = %.6f" % (report.pearson_r, report.pearson_p))
    return "\n".join(lines)

def main(argv=None):
    """
    Entry point of the legacy-forge command.

    Returns:
        int: 0 when every target completed, 2 when some didn't, 1 on a configuration
        error.
    """
    args = buildParser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(levelname)s] %(message)s",
    )
    try:
        if args.command == "run":
            config = load_config(args.config, {
                "targets": targetsOverride(args.targets),
                "max_iterations": args.max_iter,
                "output_dir": args.out,
                "parallelism": args.parallelism,
                "annotate_originals": args.annotate or None,
            })
            backend = backendOverride(args.backend, config.backend)
            if backend is not None:
                config = replace(config, backend=backend)
            report = run_pipeline(config)
        else:
            report = aggregate(load_records(args.out))
            emit_reports(report, args.out)
    except FatalConfig as err:
        log.error(str(err))
        return 1
    except CustomError as err:
        log.error(str(err))
        return 1
    print(describe(report))
    return 0 if report.allCompleted else 2

if __name__ == "__main__":
    sys.exit(main())
