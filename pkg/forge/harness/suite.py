"""
Test suites and the harness file they render to.

A harness is the mockup text, unchanged so its line numbers stay valid for coverage,
followed by the assertion macro, the model's support code, the test cases and a main()
that runs one case named on the command line. Cases that crashed are kept in the file as
line comments under a "// CRASH: <signal>" marker.
"""
import logging
import re
from dataclasses import dataclass, replace
from enum import Enum
from forge.constants import (
    ASSERT_MACRO, COMMENT_PREFIX, CRASH_MARKER, CustomError, TEST_PREFIX,
)

log = logging.getLogger(__name__)

FUNCTION_NAME = re.compile(r"([A-Za-z_]\w*)\s*\(")
ASSERT_DEFINITION = "\n".join([
    "#ifndef %s" % ASSERT_MACRO,
    "#define %s(cond) do { if (!(cond)) { \\" % ASSERT_MACRO,
    '    fprintf(stderr, "%%s:%%d: %s failed: %%s\\n", __FILE__, __LINE__, #cond); \\' % ASSERT_MACRO,
    "    exit(1); } } while (0)",
    "#endif",
])

class NoTestsFound(CustomError):
    pass

class CaseStatus(str, Enum):
    PENDING = "pending"
    PASSED = "passed"
    FAILED_ASSERT = "failed_assert"
    CRASHED = "crashed"
    DISABLED_CRASH = "disabled_crash"

@dataclass(frozen=True)
class TestCase:
    __test__ = False
    name: str
    source: str
    status: CaseStatus = CaseStatus.PENDING
    crash_signal: str = None
    output: str = ""

@dataclass(frozen=True)
class TestSuite:
    __test__ = False
    target: str
    cases: tuple
    harness_source: str
    iteration: int
    support_code: tuple = ()
    mockup: object = None

    def case(self, name):
        for case in self.cases:
            if case.name == name:
                return case
        return None

    @property
    def enabledCases(self):
        return [case for case in self.cases if case.status != CaseStatus.DISABLED_CRASH]

    @property
    def testsText(self):
        """Everything the harness adds after the mockup."""
        return self.harness_source[len(self.mockup.source_text):]

@dataclass(frozen=True)
class CodeChunk:
    text: str
    function: str = None
    nameOffset: int = -1

def maskCode(text):
    """
    Same-length copy of C text with comments and string/char literals blanked, so
    brackets and semicolons in them don't count. Newlines are kept.
    """
    out = list(text)
    length = len(text)

    def blank(start, end):
        for k in range(start, end):
            if out[k] != "\n":
                out[k] = " "

    i = 0
    while i < length:
        if text.startswith("//", i):
            end = text.find("\n", i)
            end = length if end < 0 else end
        elif text.startswith("/*", i):
            end = text.find("*/", i + 2)
            end = length if end < 0 else end + 2
        elif text[i] in "\"'":
            quote = text[i]
            end = i + 1
            while end < length and text[end] != quote and text[end] != "\n":
                end += 2 if text[end] == "\\" else 1
            end = min(end + 1, length)
        else:
            i += 1
            continue
        blank(i, end)
        i = end
    return "".join(out)

def splitChunks(code):
    """
    Splits C text into top-level items: preprocessor directives, declarations ending in
    ";" and function definitions ending in "}".

    Args:
        code (str): C text.

    Returns:
        list: CodeChunk per item; function definitions carry their name and the
        name's offset within the chunk text.
    """
    masked = maskCode(code)
    chunks = []
    start = 0
    depth = 0
    headBrace = None
    i = 0

    def emit(end, function=None, nameAt=-1):
        raw = code[start:end]
        lead = len(raw) - len(raw.lstrip())
        text = raw.strip()
        if text:
            chunks.append(CodeChunk(text, function, nameAt - start - lead if function else -1))

    while i < len(code):
        ch = masked[i]
        if depth == 0 and ch == "#" and not masked[masked.rfind("\n", 0, i) + 1:i].strip():
            end = i
            while True:
                end = code.find("\n", end)
                if end < 0:
                    end = len(code)
                    break
                if code[end - 1] != "\\":
                    break
                end += 1
            emit(end)
            start = i = end
            continue
        if ch in "([{":
            depth += 1
            if ch == "{" and depth == 1 and headBrace is None:
                headBrace = i
        elif ch in ")]}":
            depth -= 1
            if ch == "}" and depth == 0 and headBrace is not None \
                    and masked[start:headBrace].rstrip().endswith(")"):
                name = FUNCTION_NAME.search(masked, start, headBrace)
                emit(i + 1, name.group(1) if name else None, name.start(1) if name else -1)
                start = i + 1
                headBrace = None
        elif ch == ";" and depth == 0:
            emit(i + 1)
            start = i + 1
            headBrace = None
        i += 1
    emit(len(code))
    return chunks

def uniqueName(name, iteration, taken):
    candidate = "%s_v%d" % (name, iteration)
    suffix = 2
    while candidate in taken:
        candidate = "%s_v%d_%d" % (name, iteration, suffix)
        suffix += 1
    return candidate

def commentOut(case):
    lines = ["%s: %s" % (CRASH_MARKER, case.crash_signal or "crash")]
    lines += [COMMENT_PREFIX + line for line in case.source.split("\n")]
    return "\n".join(lines)

def uncomment(block):
    """Inverse of the commented-out form: the case source under a CRASH marker."""
    lines = block.split("\n")
    if lines and lines[0].startswith(CRASH_MARKER):
        lines = lines[1:]
    return "\n".join(line[len(COMMENT_PREFIX):] if line.startswith(COMMENT_PREFIX) else line
                     for line in lines)

def renderDispatcher(cases):
    lines = [
        "int main(int argc, char **argv)",
        "{",
        "    if (argc != 2) {",
        '        fprintf(stderr, "usage: %s <test case>\\n", argv[0]);',
        "        return 2;",
        "    }",
    ]
    for case in cases:
        if case.status == CaseStatus.DISABLED_CRASH:
            continue
        lines += [
            '    if (strcmp(argv[1], "%s") == 0) {' % case.name,
            "        %s();" % case.name,
            "        return 0;",
            "    }",
        ]
    lines += [
        '    fprintf(stderr, "unknown test case %s\\n", argv[1]);',
        "    return 3;",
        "}",
    ]
    return "\n".join(lines)

def renderHarness(mockup, support, cases, iteration):
    tail = ["", "/* test harness for %s, iteration %d */" % (mockup.target, iteration)]
    # tests may call exposed statics by their original names
    tail += ["#define %s %s" % pair for pair in sorted(mockup.renames.items())]
    tail.append(ASSERT_DEFINITION)
    for text in support:
        tail += ["", text]
    for case in cases:
        body = commentOut(case) if case.status == CaseStatus.DISABLED_CRASH else case.source
        tail += ["", body]
    tail += ["", renderDispatcher(cases)]
    return mockup.source_text + "\n".join(tail) + "\n"

def build_harness(mockup, generated_code, iteration, previous=None):
    """
    Turns model output into a test suite.

    Args:
        mockup (MockupUnit): the mockup under test.
        generated_code (str): C text with test_* functions and any helpers.
        iteration (int): loop iteration, used to rename clashing cases.
        previous (TestSuite, optional): the last suite; its disabled crash cases are
            carried forward. Defaults to None.

    Raises:
        NoTestsFound: the code defines no test_* function.

    Returns:
        TestSuite: the new suite with every case pending.
    """
    carried = [case for case in previous.cases if case.status == CaseStatus.DISABLED_CRASH] \
        if previous else []
    taken = {case.name for case in carried}
    carriedSources = {(case.name, case.source) for case in carried}
    support = []
    cases = []
    for chunk in splitChunks(generated_code):
        if chunk.function == "main":
            log.warning("dropping main() from generated code for %s", mockup.target)
            continue
        if not chunk.function or not chunk.function.startswith(TEST_PREFIX):
            support.append(chunk.text)
            continue
        name, source = chunk.function, chunk.text
        if (name, source) in carriedSources:
            # known to crash, already kept as a comment
            continue
        if name in taken:
            newName = uniqueName(name, iteration, taken)
            source = source[:chunk.nameOffset] + newName + source[chunk.nameOffset + len(name):]
            log.info("renamed %s to %s", name, newName)
            name = newName
        taken.add(name)
        cases.append(TestCase(name, source))
    if not cases:
        raise NoTestsFound("no %s* functions in generated code for %s" % (TEST_PREFIX, mockup.target))
    allCases = tuple(carried + cases)
    return TestSuite(
        target=mockup.target,
        cases=allCases,
        harness_source=renderHarness(mockup, support, allCases, iteration),
        iteration=iteration,
        support_code=tuple(support),
        mockup=mockup,
    )

def rerender(suite, cases):
    return replace(
        suite,
        cases=tuple(cases),
        harness_source=renderHarness(suite.mockup, suite.support_code, cases, suite.iteration),
    )

def disable_crashed(suite):
    """
    Comments out every crashed case, keeping its signal in the CRASH marker. Running it
    twice changes nothing.

    Returns:
        TestSuite: the updated suite.
    """
    cases = [
        replace(case, status=CaseStatus.DISABLED_CRASH) if case.status == CaseStatus.CRASHED else case
        for case in suite.cases
    ]
    disabled = sum(1 for old, new in zip(suite.cases, cases) if old.status != new.status)
    if disabled:
        log.info("disabled %d crashing case(s) of %s", disabled, suite.target)
    return rerender(suite, cases)
