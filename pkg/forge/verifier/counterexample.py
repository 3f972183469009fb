"""
Parses the counterexample sections of bounded model checker output into Violations.

The grammar is a table so other checkers with the same overall shape (a section
marker, numbered states with assignments, a "Violated property" block) can be added
without touching the parser. Parsing never raises: a section it can't make sense of
becomes a single Violation of kind OTHER carrying the raw text.
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum

log = logging.getLogger(__name__)

class PropertyKind(str, Enum):
    POINTER_DEREF = "pointer_deref"
    ARRAY_BOUNDS = "array_bounds"
    ARITHMETIC_OVERFLOW = "arithmetic_overflow"
    DIVISION_BY_ZERO = "division_by_zero"
    ASSERTION = "assertion"
    OTHER = "other"

@dataclass(frozen=True)
class Violation:
    property_kind: PropertyKind
    detail: str
    location: tuple
    function: str = ""
    condition: str = ""
    assignments: tuple = ()
    trace_depth: int = 0

@dataclass(frozen=True)
class CounterexampleGrammar:
    section: object
    state: object
    separator: object
    assignment: object
    violated: object
    terminator: object

GRAMMARS = {
    "esbmc": CounterexampleGrammar(
        section=re.compile(r"^\[Counterexample\]$"),
        state=re.compile(r"^State \d+\b"),
        separator=re.compile(r"^-{4,}$"),
        assignment=re.compile(r"^\s+([^=]+?)\s*=\s*(.*\S)\s*$"),
        violated=re.compile(r"^Violated property:$"),
        terminator=re.compile(r"^(VERIFICATION (FAILED|SUCCESSFUL)|Bug found|\[Counterexample\])"),
    ),
    "cbmc": CounterexampleGrammar(
        section=re.compile(r"^Counterexample:$"),
        state=re.compile(r"^State \d+\b"),
        separator=re.compile(r"^-{4,}$"),
        assignment=re.compile(r"^\s+([^=]+?)\s*=\s*(.*\S)\s*$"),
        violated=re.compile(r"^Violated property:$"),
        terminator=re.compile(r"^(VERIFICATION (FAILED|SUCCESSFUL)|\*\* |Counterexample:)"),
    ),
}

# first match wins
PROPERTY_KINDS = [
    (re.compile(r"dereference failure|null pointer|invalid pointer", re.IGNORECASE), PropertyKind.POINTER_DEREF),
    (re.compile(r"array bounds|out of bounds", re.IGNORECASE), PropertyKind.ARRAY_BOUNDS),
    (re.compile(r"overflow", re.IGNORECASE), PropertyKind.ARITHMETIC_OVERFLOW),
    (re.compile(r"division by zero", re.IGNORECASE), PropertyKind.DIVISION_BY_ZERO),
    (re.compile(r"assertion", re.IGNORECASE), PropertyKind.ASSERTION),
]
FILE_FIELD = re.compile(r"\bfile\s+(\S+)")
LINE_FIELD = re.compile(r"\bline\s+(\d+)")
FUNCTION_FIELD = re.compile(r"\bfunction\s+(\S+)")
BINARY_SUFFIX = re.compile(r"\s+\((?:[01]+\s?)+\)$")
# lines are 1-based even when the checker names none
UNKNOWN_LOCATION = ("<unknown>", 1)

def classify(description):
    for pattern, kind in PROPERTY_KINDS:
        if pattern.search(description):
            return kind
    return PropertyKind.OTHER

def locationOf(text):
    fileMatch = FILE_FIELD.search(text)
    lineMatch = LINE_FIELD.search(text)
    if not fileMatch or not lineMatch:
        return None
    return (fileMatch.group(1), int(lineMatch.group(1)))

def functionOf(text):
    match = FUNCTION_FIELD.search(text)
    return match.group(1) if match else ""

def hasCounterexample(rawOutput, grammar="esbmc"):
    rules = GRAMMARS[grammar]
    return any(rules.section.match(line.strip()) for line in rawOutput.splitlines())

def splitSections(lines, rules):
    starts = [i for i, line in enumerate(lines) if rules.section.match(line.strip())]
    return [lines[start + 1:end] for start, end in zip(starts, starts[1:] + [len(lines)])]

def parseSection(lines, rules):
    """
    Reads one counterexample section.

    Args:
        lines (list): the section's lines, marker excluded.
        rules (CounterexampleGrammar): the checker's grammar.

    Returns:
        Violation: the violated property with the trace's input assignments.
    """
    states = 0
    assignments = []
    lastLocation = None
    lastFunction = ""
    violatedAt = None
    for i, line in enumerate(lines):
        stripped = line.strip()
        if rules.violated.match(stripped):
            violatedAt = i
            break
        if rules.state.match(stripped):
            states += 1
            lastLocation = locationOf(stripped) or lastLocation
            lastFunction = functionOf(stripped) or lastFunction
            continue
        if not stripped or rules.separator.match(stripped) or states == 0:
            continue
        match = rules.assignment.match(line)
        if match:
            value = BINARY_SUFFIX.sub("", match.group(2)).strip()
            assignments.append((match.group(1).strip(), value))
    if violatedAt is None and states == 0:
        raw = " ".join(line.strip() for line in lines if line.strip())
        return Violation(PropertyKind.OTHER, raw, UNKNOWN_LOCATION)
    location = None
    function = lastFunction
    detail = []
    if violatedAt is not None:
        for line in lines[violatedAt + 1:]:
            stripped = line.strip()
            if not stripped:
                if detail:
                    break
                continue
            if rules.terminator.match(stripped):
                break
            if location is None and not detail and locationOf(stripped):
                location = locationOf(stripped)
                function = functionOf(stripped) or function
                continue
            detail.append(stripped)
    description = detail[0] if detail else ""
    known = [place for place in (location, lastLocation) if place is not None and place[1] >= 1]
    return Violation(
        property_kind=classify(description),
        detail=description,
        location=known[0] if known else UNKNOWN_LOCATION,
        function=function,
        condition=" ".join(detail[1:]),
        assignments=tuple(assignments),
        trace_depth=states,
    )

def parse_counterexample(raw_output, grammar="esbmc"):
    """
    Args:
        raw_output (str): the checker's combined output.
        grammar (str, optional): key into GRAMMARS. Defaults to "esbmc".

    Returns:
        list: one Violation per counterexample section, in output order.
    """
    rules = GRAMMARS[grammar]
    lines = raw_output.splitlines()
    violations = [parseSection(section, rules) for section in splitSections(lines, rules)]
    log.debug("parsed %d counterexample sections", len(violations))
    return violations
