import glob
import json
import logging
import os
import re
from dataclasses import dataclass
from forge.constants import COVERAGE_TOOL, CustomError
from forge.externals.process_utils import runBounded

log = logging.getLogger(__name__)

# "   count:  line:source"
GCOV_LINE = re.compile(r"^\s*([^:]+):\s*(\d+):")
UNEXECUTED = {"#####", "=====", "%%%%%", "$$$$$"}

class NoCoverageData(CustomError):
    pass

class CoverageToolFailed(CustomError):
    pass

@dataclass(frozen=True)
class CoverageReport:
    """
    Line coverage of the mockup part of a harness.

    Attributes:
        per_line (dict): mockup line -> execution count, executable copied lines only.
        pct (float): covered share of those lines, 0 to 100.
        uncovered (tuple): mockup lines never executed, ascending.
    """
    per_line: dict
    pct: float
    uncovered: tuple

    @property
    def covered(self):
        return len(self.per_line) - len(self.uncovered)

    def toJson(self):
        return {
            "per_line": {str(line): count for line, count in sorted(self.per_line.items())},
            "pct": self.pct,
            "uncovered": list(self.uncovered),
        }

def parseGcov(text):
    """
    Reads execution counts out of a .gcov file.

    Args:
        text (str): gcov's annotated source.

    Returns:
        dict: line -> count for executable lines; unexecuted lines count 0.
    """
    counts = {}
    for line in text.splitlines():
        match = GCOV_LINE.match(line)
        if not match:
            continue
        tag = match.group(1).strip()
        number = int(match.group(2))
        if number == 0 or tag == "-":
            continue
        if tag in UNEXECUTED:
            count = 0
        else:
            digits = tag.rstrip("*")
            if not digits.isdigit():
                continue
            count = int(digits)
        counts[number] = max(count, counts.get(number, 0))
    return counts

def coverageFromCounts(counts, mockup):
    perLine = {line: counts[line] for line in mockup.mappedLines() if line in counts}
    uncovered = tuple(sorted(line for line, count in perLine.items() if count == 0))
    pct = 100.0 * (len(perLine) - len(uncovered)) / len(perLine) if perLine else 0.0
    return CoverageReport(per_line=perLine, pct=pct, uncovered=uncovered)

def measure_coverage(binary_dir, mockup, coverageTool=None):
    """
    Runs gcov over a harness built by compile_suite and keeps the lines copied from the
    original source. Stubs, prototypes and the harness itself don't count.

    Args:
        binary_dir (str): the directory the harness was built and run in.
        mockup (MockupUnit): the mockup the harness starts with.
        coverageTool (list, optional): gcov command. Defaults to COVERAGE_TOOL.

    Raises:
        NoCoverageData: no case wrote counters.
        CoverageToolFailed: gcov failed or wrote no report.

    Returns:
        CoverageReport: the coverage.
    """
    sourceName = "%s_test.c" % mockup.target
    binary_dir = os.path.abspath(binary_dir)
    if not glob.glob(os.path.join(binary_dir, "*.gcda")):
        raise NoCoverageData("no .gcda files in %s" % binary_dir)
    command = list(coverageTool or COVERAGE_TOOL) + ["-o", binary_dir, sourceName]
    try:
        result = runBounded(command, timeout=120, cwd=binary_dir)
    except OSError as err:
        raise CoverageToolFailed("cannot run %s: %s" % (command[0], err))
    if result.returncode != 0 or result.timedOut:
        raise CoverageToolFailed(result.output)
    gcovPath = os.path.join(binary_dir, sourceName + ".gcov")
    if not os.path.isfile(gcovPath):
        raise CoverageToolFailed("%s wrote no %s" % (command[0], gcovPath))
    with open(gcovPath, "r", encoding="utf-8", errors="replace") as infile:
        report = coverageFromCounts(parseGcov(infile.read()), mockup)
    log.info("%s: %.1f%% of %d lines covered", mockup.target, report.pct, len(report.per_line))
    return report

def coverage_summary(report, mockup):
    """Text for the model: the share covered and the source of every uncovered line."""
    if report is None:
        return "No coverage data: no test case ran to completion."
    lines = ["%d of %d executable lines covered (%.1f%%)."
             % (report.covered, len(report.per_line), report.pct)]
    if report.uncovered:
        source = mockup.source_text.split("\n")
        lines.append("Uncovered lines:")
        for line in report.uncovered:
            text = source[line - 1].strip() if 1 <= line <= len(source) else "(not a mockup line)"
            lines.append("  %d: %s" % (line, text))
    return "\n".join(lines)

def write_coverage(report, path):
    with open(path, "w", encoding="utf-8") as outfile:
        json.dump(report.toJson(), outfile, indent=2, sort_keys=True)
    return path
