import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from enum import Enum
from forge.constants import (
    CustomError, DEFAULT_UNWIND_BOUND, DEFAULT_VERIFIER_TIMEOUT, DRIVER_BUFFER_LEN,
    VERIFIER, VERIFIER_PROPERTY_FLAGS,
)
from forge.externals.process_utils import findExecutable, runBounded
from forge.mockups.stubs import declareAs
from forge.verifier.counterexample import GRAMMARS, hasCounterexample, parse_counterexample

log = logging.getLogger(__name__)

class ToolMissing(CustomError):
    pass

class Verdict(str, Enum):
    SUCCESSFUL = "successful"
    FAILED = "failed"
    TIMEOUT = "timeout"
    TOOL_ERROR = "tool_error"

@dataclass(frozen=True)
class VerifierConfig:
    executable: str = VERIFIER
    timeout: float = DEFAULT_VERIFIER_TIMEOUT
    unwind_bound: int = DEFAULT_UNWIND_BOUND
    extra_flags: tuple = tuple(VERIFIER_PROPERTY_FLAGS)
    grammar: str = "esbmc"

    def __post_init__(self):
        if not self.timeout or self.timeout <= 0:
            raise CustomError("verifier timeout must be positive, got %r" % self.timeout)
        if self.unwind_bound < 1:
            raise CustomError("unwind bound must be at least 1, got %r" % self.unwind_bound)
        if self.grammar not in GRAMMARS:
            raise CustomError("unknown counterexample grammar %s" % self.grammar)

@dataclass(frozen=True)
class VerifierReport:
    verdict: Verdict
    violations: tuple = ()
    raw_output: str = ""
    elapsed: float = 0.0
    unwind_bound: int = DEFAULT_UNWIND_BOUND
    timeout: float = DEFAULT_VERIFIER_TIMEOUT
    command: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.verdict == Verdict.FAILED and not self.violations:
            raise CustomError("a failed verdict needs at least one violation")
        if self.verdict != Verdict.FAILED and self.violations:
            raise CustomError("a %s verdict can't carry violations" % self.verdict.value)

    def toJson(self):
        data = asdict(self)
        data["verdict"] = self.verdict.value
        data["violations"] = [
            dict(asdict(v), property_kind=v.property_kind.value) for v in self.violations
        ]
        return data

def synthesize_driver(mockup):
    """
    Writes a main() that calls the target with unconstrained inputs: scalars are
    uninitialized locals the checker treats as nondeterministic, pointers get a small
    uninitialized buffer, function pointers are null.

    Args:
        mockup (MockupUnit): the mockup to drive.

    Returns:
        str: C text to append to the mockup.
    """
    lines = ["", "/* verification driver */", "int main(void)", "{"]
    args = []
    for i, param in enumerate(mockup.entry.params):
        if param.shape == "ellipsis":
            continue
        if param.shape in ("pointer", "array"):
            # long long keeps the buffer aligned for any scalar the target reads through it
            lines.append("    long long forge_buf%d[%d];" % (i, max(DRIVER_BUFFER_LEN // 8, 1)))
            args.append("(%s)forge_buf%d" % (param.type_text, i))
        elif param.shape == "function_pointer":
            args.append("0")
        else:
            local = "forge_arg%d" % i
            lines.append("    %s;" % declareAs(param.type_text, local))
            args.append(local)
    lines.append("    %s(%s);" % (mockup.entryName, ", ".join(args)))
    lines.append("    return 0;")
    lines.append("}")
    return "\n".join(lines) + "\n"

def run_verifier(mockup, config=None, workDir=None):
    """
    Runs the bounded model checker on a mockup plus driver.

    Args:
        mockup (MockupUnit): the mockup.
        config (VerifierConfig, optional): checker settings. Defaults to VerifierConfig().
        workDir (str, optional): where <target>_verify.c goes. Defaults to a fresh
            temporary directory.

    Raises:
        ToolMissing: the checker executable can't be found or started.

    Returns:
        VerifierReport: the verdict. A timeout or a crash of the checker is a verdict,
        not an exception.
    """
    config = config or VerifierConfig()
    executable = findExecutable(config.executable)
    if executable is None:
        raise ToolMissing("verifier %s not found" % config.executable)
    workDir = workDir or tempfile.mkdtemp(prefix="forge-verify-")
    os.makedirs(workDir, exist_ok=True)
    path = os.path.join(workDir, "%s_verify.c" % mockup.target)
    with open(path, "w", encoding="utf-8") as outfile:
        outfile.write(mockup.source_text + synthesize_driver(mockup))
    command = [executable, path, "--unwind", str(config.unwind_bound)] + list(config.extra_flags)
    try:
        result = runBounded(command, timeout=config.timeout, cwd=workDir)
    except OSError as err:
        raise ToolMissing("cannot start %s: %s" % (executable, err))
    common = dict(
        raw_output=result.output,
        elapsed=result.elapsed,
        unwind_bound=config.unwind_bound,
        timeout=config.timeout,
        command=tuple(command),
    )
    if result.timedOut:
        report = VerifierReport(Verdict.TIMEOUT, **common)
    elif result.returncode == 0:
        report = VerifierReport(Verdict.SUCCESSFUL, **common)
    elif hasCounterexample(result.output, config.grammar):
        violations = parse_counterexample(result.output, config.grammar)
        report = VerifierReport(Verdict.FAILED, violations=tuple(violations), **common)
    else:
        report = VerifierReport(Verdict.TOOL_ERROR, **common)
    log.info("verifier on %s: %s (%d violations, %.1fs)",
             mockup.target, report.verdict.value, len(report.violations), report.elapsed)
    return report

def writeReport(report, path):
    with open(path, "w", encoding="utf-8") as outfile:
        json.dump(report.toJson(), outfile, indent=2, sort_keys=True)
    return path
