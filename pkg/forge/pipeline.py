import fnmatch
import glob
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from forge.config import FatalConfig
from forge.constants import CustomError
from forge.externals.miscellaneous import contentHash, timeFormatter
from forge.externals.process_utils import findExecutable
from forge.frontend.c_parser import ParseFailed, PreprocessFailed, discover_functions, parse_unit
from forge.frontend.symbol_graph import build_graph, implied_closure
from forge.gateway.backends import complete
from forge.gateway.prompts import Instruction, PromptBundle, assemble_prompt
from forge.harness.coverage import (
    CoverageToolFailed, NoCoverageData, coverage_summary, measure_coverage, write_coverage,
)
from forge.harness.runner import CompileFailure, CompilerConfig, compile_suite, execute_suite, harnessPaths
from forge.harness.suite import CaseStatus, NoTestsFound, build_harness, disable_crashed
from forge.mockups.mockup import Edit, EditScript, annotate_many, apply_edits, generate_mockup, write_mockup
from forge.reflection import Decision, ErrorCounters, LoopState, reflect, should_continue
from forge.reports import aggregate, emit_reports
from forge.verifier.checker import Verdict, run_verifier, writeReport
from forge.verifier.summary import sensitization_summary

log = logging.getLogger(__name__)

SESSION_FILE = "session.json"
ANNOTATIONS_FILE = "annotations.json"

class FinalStatus(str, Enum):
    COMPLETED = "completed"
    PARSE_FAILED = "parse_failed"
    NEVER_COMPILED = "never_compiled"
    BUDGET_EXHAUSTED = "budget_exhausted"
    ERRORED = "errored"

@dataclass
class IterationEntry:
    iteration: int
    compile_ok: bool = False
    n_cases: int = 0
    n_crashed: int = 0
    n_disabled: int = 0
    coverage_pct: float = None
    rating: int = None
    verdicts: dict = field(default_factory=dict)
    compile_errors: int = 0
    generation_error: bool = False
    decision: str = None

@dataclass
class SessionRecord:
    """
    Everything a target's run left behind, persisted as <output_dir>/<target>/session.json.
    """
    target: str
    source: str = ""
    function: str = ""
    entries: list = field(default_factory=list)
    final_status: FinalStatus = FinalStatus.ERRORED
    wall_time: float = 0.0
    ratings: list = field(default_factory=list)
    verifier_verdict: str = None
    verifier_timeouts: int = 0
    mockup_hash: str = None
    error: str = None
    annotations: int = 0

    @property
    def compile_errors(self):
        return sum(entry.compile_errors for entry in self.entries)

    @property
    def crash_tests(self):
        return sum(entry.n_crashed for entry in self.entries)

    @property
    def cycles(self):
        return len(self.ratings)

    @property
    def final_coverage(self):
        measured = [entry.coverage_pct for entry in self.entries if entry.coverage_pct is not None]
        return measured[-1] if measured else None

    def toJson(self):
        data = asdict(self)
        data["final_status"] = FinalStatus(self.final_status).value
        return data

    @classmethod
    def fromJson(cls, data):
        data = dict(data)
        data["entries"] = [IterationEntry(**entry) for entry in data.get("entries", [])]
        data["final_status"] = FinalStatus(data.get("final_status", FinalStatus.ERRORED.value))
        return cls(**data)

@dataclass(frozen=True)
class Target:
    key: str
    function: str
    source: str

def writeRecord(record, path):
    Path(os.path.dirname(path)).mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as outfile:
        json.dump(record.toJson(), outfile, indent=2, sort_keys=True)

def readRecord(path):
    with open(path, "r", encoding="utf-8") as infile:
        return SessionRecord.fromJson(json.load(infile))

def load_records(out_dir):
    """
    Reads every persisted SessionRecord under an output directory.

    Returns:
        list: records sorted by target.
    """
    records = []
    for path in sorted(glob.glob(os.path.join(out_dir, "*", SESSION_FILE))):
        try:
            records.append(readRecord(path))
        except (ValueError, TypeError, KeyError) as err:
            log.warning("skipping unreadable %s: %s", path, err)
    return sorted(records, key=lambda record: record.target)

def sourceFiles(roots):
    files = []
    for root in roots:
        if os.path.isdir(root):
            files += sorted(glob.glob(os.path.join(root, "**", "*.c"), recursive=True))
        elif os.path.isfile(root):
            files.append(root)
        else:
            raise FatalConfig("source root %s does not exist" % root)
    return files

def selected(name, selector):
    if selector == "all":
        return True
    if isinstance(selector, str):
        return fnmatch.fnmatchcase(name, selector)
    return name in selector

def stemOf(path):
    return os.path.splitext(os.path.basename(path))[0]

def discoverTargets(config):
    """
    Parses every source file and lists the selected functions.

    Args:
        config (RunConfig): the run configuration.

    Returns:
        tuple: (targets, units by path, records of files that failed to parse)
    """
    units = {}
    failures = []
    found = []
    for path in sourceFiles(config.source_roots):
        try:
            units[path] = parse_unit(path, config.include_dirs, config.defines, list(config.preprocessor))
        except (PreprocessFailed, ParseFailed) as err:
            log.warning("%s: %s", path, err)
            failures.append(SessionRecord(
                target=stemOf(path), source=path, final_status=FinalStatus.PARSE_FAILED, error=str(err),
            ))
            continue
        found += [(name, path) for name in discover_functions(units[path]) if selected(name, config.targets)]
    counts = {}
    for name, _ in found:
        counts[name] = counts.get(name, 0) + 1
    targets = [
        Target("%s__%s" % (name, stemOf(path)) if counts[name] > 1 else name, name, path)
        for name, path in found
    ]
    log.info("%d source files, %d targets, %d parse failures", len(units) + len(failures), len(targets), len(failures))
    return targets, units, failures

def checkTools(config):
    commands = [config.preprocessor, config.compiler, config.coverage_tool, [config.verifier.executable]]
    missing = [command[0] for command in commands if findExecutable(command) is None]
    if missing:
        raise FatalConfig("tools not found: %s" % ", ".join(missing))

class TargetSession(object):
    def __init__(self, target, unit, graph, backend, config):
        """
        The full pipeline for one target function: mockup, verifier, then the
        generate/compile/run/reflect loop.

        Args:
            target (Target): the target.
            unit (TranslationUnit): its parsed source file.
            graph (SymbolGraph): the unit's dependency graph.
            backend (ModelBackend): the model for this target.
            config (RunConfig): the run configuration.
        """
        self.target = target
        self.unit = unit
        self.graph = graph
        self.backend = backend
        self.config = config
        self.workDir = os.path.abspath(os.path.join(config.output_dir, target.key))
        self.compilerConfig = CompilerConfig(
            compiler=tuple(config.compiler), flags=tuple(config.compile_flags),
        )
        self.record = SessionRecord(target=target.key, source=target.source, function=target.function)
        self.state = None
        self.verifierReport = None
        # crashed case name -> signal, over every iteration
        self.crashes = {}
        Path(self.workDir).mkdir(parents=True, exist_ok=True)

    def prepare(self):
        """Mockup and verifier steps. Returns (mockup, sensitization summary)."""
        closure = implied_closure(self.graph, self.target.function)
        mockup = generate_mockup(
            closure, self.unit, self.graph.external_unresolved, self.config.stub_policy,
            target=self.target.function, prelude=list(self.config.prelude_includes),
        )
        write_mockup(mockup, self.workDir)
        self.record.mockup_hash = contentHash(mockup.source_text)
        report = run_verifier(mockup, self.config.verifier, self.workDir)
        writeReport(report, os.path.join(self.workDir, "verifier.json"))
        self.record.verifier_verdict = report.verdict.value
        self.record.verifier_timeouts = 1 if report.verdict == Verdict.TIMEOUT else 0
        self.verifierReport = report
        return mockup, sensitization_summary(report, mockup)

    def generate(self, bundle):
        response = complete(self.backend, assemble_prompt(bundle), Instruction.GENERATE_TESTS)
        return response.extracted_code

    def run(self):
        mockup, verifierSummary = self.prepare()
        state = self.state = LoopState(max_iterations=self.config.max_iterations)
        lastGood = None
        coverage = None
        priorTests = None
        diagnostics = None
        plan = None
        while True:
            # step 1: generate
            state.iteration += 1
            entry = IterationEntry(iteration=state.iteration)
            errors = ErrorCounters()
            bundle = PromptBundle(
                mockup_source=mockup.source_text,
                prior_tests=priorTests,
                coverage_summary=coverage_summary(coverage, mockup) if lastGood else None,
                verifier_summary=verifierSummary,
                diagnostics=diagnostics,
                plan=plan,
                token_budget=self.config.token_budget,
            )
            code = self.generate(bundle)
            suite = None
            if code is None:
                diagnostics = "The previous answer had no fenced C code block."
            else:
                # step 2: build
                try:
                    suite = build_harness(mockup, code, state.iteration, previous=lastGood)
                except NoTestsFound as err:
                    diagnostics = "The previous answer defined no test functions: %s" % err
                    priorTests = code
            if suite is None:
                entry.generation_error = True
                errors.compile_errors = 1
            else:
                # step 3: compile
                binary = compile_suite(suite, self.compilerConfig, self.workDir)
                if isinstance(binary, CompileFailure):
                    errors.compile_errors = 1
                    diagnostics = binary.diagnostics
                    priorTests = suite.testsText
                else:
                    # steps 4 and 5: execute, then disable crashes
                    suite = execute_suite(binary, suite, self.config.per_case_timeout)
                    crashed = [c for c in suite.cases if c.status == CaseStatus.CRASHED]
                    errors.crashes = len(crashed)
                    self.crashes.update((c.name, c.crash_signal) for c in crashed)
                    suite = disable_crashed(suite)
                    # step 6: coverage
                    coverage = self.measure(mockup)
                    lastGood = suite
                    diagnostics = None
                    priorTests = suite.testsText
                    entry.compile_ok = True
                    entry.n_cases = len(suite.cases)
                    entry.n_disabled = sum(1 for c in suite.cases if c.status == CaseStatus.DISABLED_CRASH)
                    entry.verdicts = {c.name: c.status.value for c in suite.cases}
                    entry.coverage_pct = coverage.pct if coverage else None
            entry.compile_errors = errors.compile_errors
            entry.n_crashed = errors.crashes
            state.last_errors = errors
            # step 7: decide, reflecting before another round
            decision = should_continue(state)
            entry.decision = decision.value
            if decision == Decision.CONTINUE_LOOP or not state.rating_history:
                verdict = reflect(coverage, lastGood, self.backend, mockup, self.config.token_budget)
                state.rating_history.append(verdict)
                entry.rating = verdict.rating
                plan = verdict.plan
            self.record.entries.append(entry)
            log.info("%s iteration %d: %s, %s", self.target.key, state.iteration,
                     "compiled" if entry.compile_ok else "no build", decision.value)
            if decision != Decision.CONTINUE_LOOP:
                break
        if lastGood is not None:
            source, _, _ = harnessPaths(self.workDir, mockup.target)
            with open(source, "w", encoding="utf-8") as outfile:
                outfile.write(lastGood.harness_source)
        self.annotate(mockup)
        self.record.ratings = [verdict.rating for verdict in state.rating_history]
        self.record.final_status = self.finalStatus()
        return self.record

    def annotationNotes(self, mockup):
        """(mockup line, note) for every crashed case and every verifier violation."""
        notes = []
        entryLine = next(
            (line for line, origin in sorted(mockup.source_map.items()) if origin == mockup.entry.origin), None,
        )
        if entryLine is not None:
            for name, signal in sorted(self.crashes.items()):
                notes.append((entryLine, "CRASH: %s, %s" % (name, signal or "crash")))
        verifyName = "%s_verify.c" % mockup.target
        violations = self.verifierReport.violations if self.verifierReport else ()
        for violation in violations:
            file, line = violation.location
            # lines past the mockup belong to the verification driver
            if os.path.basename(file) != verifyName or line > mockup.lineCount:
                continue
            notes.append((line, "%s: %s" % (violation.property_kind.value.upper(), violation.detail)))
        return notes

    def annotate(self, mockup):
        """Writes the edit script that puts crash and violation notes above the original lines."""
        script = annotate_many(mockup, self.annotationNotes(mockup))
        data = {
            "target": self.target.key,
            "applied": False,
            "edits": [asdict(edit) for edit in script.edits],
        }
        with open(os.path.join(self.workDir, ANNOTATIONS_FILE), "w", encoding="utf-8") as outfile:
            json.dump(data, outfile, indent=2, sort_keys=True)
        self.record.annotations = len(script)
        return script

    def partialRecord(self, err):
        """The record so far, marked errored."""
        if self.state is not None:
            self.record.ratings = [verdict.rating for verdict in self.state.rating_history]
        self.record.final_status = FinalStatus.ERRORED
        self.record.error = "%s: %s" % (type(err).__name__, err)
        return self.record

    def measure(self, mockup):
        try:
            coverage = measure_coverage(self.workDir, mockup, list(self.config.coverage_tool))
        except NoCoverageData as err:
            log.warning("%s: %s", self.target.key, err)
            return None
        except CoverageToolFailed as err:
            log.warning("%s: coverage failed: %s", self.target.key, err)
            return None
        write_coverage(coverage, os.path.join(self.workDir, "%s_coverage.json" % mockup.target))
        return coverage

    def finalStatus(self):
        entries = self.record.entries
        if entries and entries[-1].compile_ok:
            return FinalStatus.COMPLETED
        if not any(entry.compile_ok for entry in entries):
            return FinalStatus.NEVER_COMPILED
        return FinalStatus.BUDGET_EXHAUSTED

def runTarget(target, unit, graph, backend, config):
    """
    Runs one target unless an earlier run completed it, and persists its record. Any
    failure ends up in the record instead of propagating to other targets.
    """
    sessionPath = os.path.join(config.output_dir, target.key, SESSION_FILE)
    if os.path.isfile(sessionPath):
        try:
            existing = readRecord(sessionPath)
        except (ValueError, TypeError, KeyError):
            existing = None
        if existing is not None and existing.final_status == FinalStatus.COMPLETED:
            log.info("%s already completed, skipping", target.key)
            return existing
    started = time.monotonic()
    session = None
    try:
        session = TargetSession(target, unit, graph, backend.forTarget(target.key), config)
        record = session.run()
    except Exception as err:
        log.exception("%s failed", target.key)
        if session is not None:
            record = session.partialRecord(err)
        else:
            record = SessionRecord(
                target=target.key, source=target.source, function=target.function,
                final_status=FinalStatus.ERRORED, error="%s: %s" % (type(err).__name__, err),
            )
    record.wall_time = time.monotonic() - started
    writeRecord(record, sessionPath)
    return record

def apply_annotations(output_dir, keys):
    """
    Inserts the pending annotations of the given targets into the original sources, all
    in one pass so notes from different targets on the same file land on the right
    lines. Applied scripts are marked so a resumed run doesn't insert them again.

    Args:
        output_dir (str): the run's output directory.
        keys (list): target keys.

    Returns:
        int: the number of notes inserted.
    """
    script = EditScript()
    pending = []
    for key in keys:
        path = os.path.join(output_dir, key, ANNOTATIONS_FILE)
        if not os.path.isfile(path):
            continue
        with open(path, "r", encoding="utf-8") as infile:
            data = json.load(infile)
        if data.get("applied"):
            continue
        script = script.merge(EditScript(tuple(Edit(**edit) for edit in data.get("edits", []))))
        pending.append((path, data))
    if len(script):
        apply_edits(script)
    for path, data in pending:
        data["applied"] = True
        with open(path, "w", encoding="utf-8") as outfile:
            json.dump(data, outfile, indent=2, sort_keys=True)
    return len(script)

def run_pipeline(config):
    """
    Runs every selected target of a configuration and writes the aggregate reports.

    Args:
        config (RunConfig): the run configuration.

    Raises:
        FatalConfig: a tool is missing, the output directory can't be created or the
            backend can't be set up.

    Returns:
        AggregateReport: the aggregate over all targets, including ones skipped because
        an earlier run completed them.
    """
    started = time.monotonic()
    checkTools(config)
    try:
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise FatalConfig("cannot create %s: %s" % (config.output_dir, err))
    try:
        backend = config.backend.build()
    except CustomError as err:
        raise FatalConfig(str(err))
    targets, units, failures = discoverTargets(config)
    graphs = {path: build_graph(unit) for path, unit in units.items()}
    for record in failures:
        writeRecord(record, os.path.join(config.output_dir, record.target, SESSION_FILE))

    def work(target):
        return runTarget(target, units[target.source], graphs[target.source], backend, config)

    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        records = failures + list(pool.map(work, targets))
    if config.annotate_originals:
        log.info("inserted %d notes into the original sources",
                 apply_annotations(config.output_dir, [target.key for target in targets]))
    report = aggregate(records)
    emit_reports(report, config.output_dir)
    timeFormatter(time.monotonic() - started, "Run time")
    return report
