import glob
import logging
import os
import signal
from dataclasses import dataclass, replace
from forge.constants import COMPILE_FLAGS, COMPILER, COVERAGE_FLAGS, CustomError
from forge.externals.iterable_utils import flatten
from forge.externals.process_utils import runBounded
from forge.harness.suite import CaseStatus, rerender

log = logging.getLogger(__name__)

@dataclass(frozen=True)
class CompilerConfig:
    compiler: tuple = tuple(COMPILER)
    flags: tuple = tuple(COMPILE_FLAGS)
    coverage_flags: tuple = tuple(COVERAGE_FLAGS)
    link_flags: tuple = ("-lm",)
    timeout: float = 120

@dataclass(frozen=True)
class CompileFailure:
    """A harness that didn't build. The diagnostics go back to the model verbatim."""
    diagnostics: str
    stage: str = "compile"

def harnessPaths(workDir, target):
    stem = os.path.join(workDir, "%s_test" % target)
    return stem + ".c", stem + ".o", stem

def compile_suite(suite, config=None, workDir="."):
    """
    Writes <target>_test.c and builds it with coverage instrumentation. Counters from
    earlier runs are removed first so coverage reflects this build only.

    Args:
        suite (TestSuite): the suite to build.
        config (CompilerConfig, optional): compiler settings. Defaults to
            CompilerConfig().
        workDir (str, optional): build directory. Defaults to ".".

    Returns:
        str | CompileFailure: path of the test binary, or the failure.
    """
    config = config or CompilerConfig()
    # the tools run inside workDir, so every path handed to them must be absolute
    workDir = os.path.abspath(workDir)
    os.makedirs(workDir, exist_ok=True)
    source, obj, binary = harnessPaths(workDir, suite.target)
    for stale in glob.glob(os.path.join(workDir, "*.gcda")) + [binary]:
        if os.path.exists(stale):
            os.remove(stale)
    with open(source, "w", encoding="utf-8") as outfile:
        outfile.write(suite.harness_source)
    steps = [
        ("compile", flatten([config.compiler, config.flags, config.coverage_flags, "-c", source, "-o", obj])),
        ("link", flatten([config.compiler, config.coverage_flags, obj, "-o", binary, config.link_flags])),
    ]
    for stage, command in steps:
        try:
            result = runBounded(command, timeout=config.timeout, cwd=workDir)
        except OSError as err:
            raise CustomError("cannot run %s: %s" % (command[0], err))
        if result.timedOut:
            return CompileFailure("%s timed out after %ss" % (stage, config.timeout), stage)
        if result.returncode != 0:
            log.info("%s of %s failed", stage, suite.target)
            return CompileFailure(result.output, stage)
    return binary

def signalName(number):
    try:
        name = signal.Signals(number).name
    except ValueError:
        return "signal %d" % number
    description = signal.strsignal(number)
    return "%s (%s)" % (name, description) if description else name

def execute_suite(binary, suite, per_case_timeout):
    """
    Runs every enabled case in its own process.

    Args:
        binary (str): the test binary.
        suite (TestSuite): the suite it was built from.
        per_case_timeout (float): seconds before a case is killed.

    Returns:
        TestSuite: the suite with case statuses filled in. A case killed by a signal or
        by the timeout is crashed, a nonzero exit is a failed assertion.
    """
    binary = os.path.abspath(binary)
    cases = []
    for case in suite.cases:
        if case.status == CaseStatus.DISABLED_CRASH:
            cases.append(case)
            continue
        result = runBounded([binary, case.name], timeout=per_case_timeout, cwd=os.path.dirname(binary))
        if result.timedOut:
            status, crash = CaseStatus.CRASHED, "timeout"
        elif result.returncode == 0:
            status, crash = CaseStatus.PASSED, None
        elif result.returncode > 0:
            status, crash = CaseStatus.FAILED_ASSERT, None
        else:
            status, crash = CaseStatus.CRASHED, signalName(-result.returncode)
        cases.append(replace(case, status=status, crash_signal=crash, output=result.output[-2000:]))
        log.debug("%s: %s%s", case.name, status.value, " (%s)" % crash if crash else "")
    counts = {}
    for case in cases:
        counts[case.status.value] = counts.get(case.status.value, 0) + 1
    log.info("%s: %s", suite.target, ", ".join("%d %s" % (n, s) for s, n in sorted(counts.items())))
    return rerender(suite, cases)
