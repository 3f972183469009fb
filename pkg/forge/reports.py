import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from forge.constants import CustomError
from forge.statistics import DegenerateInput, improvement_stats, pearson

log = logging.getLogger(__name__)

class IoFailure(CustomError):
    pass

TARGET_COLUMNS = [
    "target", "initial_rating", "final_rating", "cycles", "gain", "coverage_pct",
    "compile_errors", "crash_tests", "verifier_timeouts", "final_status",
]

@dataclass(frozen=True)
class TargetRow:
    target: str
    initial_rating: int
    final_rating: int
    cycles: int
    gain: int
    coverage_pct: float
    compile_errors: int
    crash_tests: int
    verifier_timeouts: int
    final_status: str

@dataclass(frozen=True)
class AggregateReport:
    n_targets: int = 0
    n_executed: int = 0
    n_coverage_measured: int = 0
    n_improved: int = 0
    improvement_rate: float = None
    median_gain: int = None
    max_gain: int = None
    counters: dict = field(default_factory=lambda: {
        "compile_errors_total": 0, "crash_tests_total": 0, "verifier_timeouts_total": 0,
    })
    rating_pairs: tuple = ()
    pearson_r: float = None
    pearson_p: float = None
    rows: tuple = ()

    @property
    def allCompleted(self):
        return all(row.final_status == "completed" for row in self.rows)

    def toJson(self):
        data = asdict(self)
        data["rating_pairs"] = [list(pair) for pair in self.rating_pairs]
        data["rows"] = [asdict(row) for row in self.rows]
        return data

def rowFor(record):
    ratings = record.ratings
    coverage = record.final_coverage
    return TargetRow(
        target=record.target,
        initial_rating=ratings[0] if ratings else None,
        final_rating=ratings[-1] if ratings else None,
        cycles=record.cycles,
        gain=ratings[-1] - ratings[0] if ratings else None,
        coverage_pct=round(coverage, 2) if coverage is not None else None,
        compile_errors=record.compile_errors,
        crash_tests=record.crash_tests,
        verifier_timeouts=record.verifier_timeouts,
        final_status=record.final_status.value,
    )

def aggregate(records):
    """
    Folds session records into the run's aggregate. Counters are plain sums over the
    records, so the aggregate can be recomputed from the output directory alone.

    Args:
        records (list): SessionRecords.

    Returns:
        AggregateReport: the aggregate.
    """
    records = sorted(records, key=lambda record: record.target)
    rated = [record for record in records if record.ratings]
    counters = {
        "compile_errors_total": sum(record.compile_errors for record in records),
        "crash_tests_total": sum(record.crash_tests for record in records),
        "verifier_timeouts_total": sum(record.verifier_timeouts for record in records),
    }
    improved, rate, median, best = 0, None, None, None
    if rated:
        improved, rate, median, best = improvement_stats(rated)
    r, p = None, None
    try:
        r, p = pearson([record.cycles for record in rated],
                       [record.ratings[-1] - record.ratings[0] for record in rated])
    except DegenerateInput as err:
        log.info("no correlation for this run: %s", err)
    return AggregateReport(
        n_targets=len(records),
        n_executed=sum(1 for record in records if record.entries),
        n_coverage_measured=sum(1 for record in records if record.final_coverage is not None),
        n_improved=improved,
        improvement_rate=rate,
        median_gain=median,
        max_gain=best,
        counters=counters,
        rating_pairs=tuple((record.target, record.ratings[0], record.ratings[-1]) for record in rated),
        pearson_r=r,
        pearson_p=p,
        rows=tuple(rowFor(record) for record in records),
    )

def writeCsv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as outfile:
        writer = csv.writer(outfile, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if value is None else value for value in row])

def emit_reports(report, directory):
    """
    Writes summary.json, targets.csv and the two plot tables (initial vs final rating,
    cycles vs gain). Emitting the same report twice gives byte-identical files.

    Args:
        report (AggregateReport): the aggregate.
        directory (str): output directory.

    Raises:
        IoFailure: a file can't be written.

    Returns:
        list: paths written.
    """
    paths = [os.path.join(directory, name) for name in
             ("summary.json", "targets.csv", "initial_vs_final.csv", "cycles_vs_gain.csv")]
    rated = [row for row in report.rows if row.initial_rating is not None]
    try:
        os.makedirs(directory, exist_ok=True)
        with open(paths[0], "w", encoding="utf-8") as outfile:
            json.dump(report.toJson(), outfile, indent=2, sort_keys=True)
            outfile.write("\n")
        writeCsv(paths[1], TARGET_COLUMNS, [[getattr(row, c) for c in TARGET_COLUMNS] for row in report.rows])
        writeCsv(paths[2], ["target", "initial_rating", "final_rating"],
                 [[row.target, row.initial_rating, row.final_rating] for row in rated])
        writeCsv(paths[3], ["target", "cycles", "gain"],
                 [[row.target, row.cycles, row.gain] for row in rated])
    except OSError as err:
        raise IoFailure("cannot write reports to %s: %s" % (directory, err))
    log.info("reports written to %s", directory)
    return paths
