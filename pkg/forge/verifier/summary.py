import os
from forge.constants import SYNTHESIZED
from forge.mockups.mockup import LineOutOfRange, map_back
from forge.verifier.checker import Verdict

def mockupLocation(violation, mockup):
    """Describes where a violation happened, in mockup and original terms."""
    file, line = violation.location
    if os.path.basename(file) != "%s_verify.c" % mockup.target:
        return "%s:%d" % (file, line)
    try:
        origin = map_back(mockup, line)
    except LineOutOfRange:
        return "mockup line %d (driver)" % line
    if origin == SYNTHESIZED:
        return "mockup line %d" % line
    return "mockup line %d (%s:%d)" % (line, os.path.basename(origin[0]), origin[1])

def sensitization_summary(report, mockup):
    """
    Turns a verifier report into the short text the model sees when asked for tests:
    what went wrong, where, and the inputs that got there.

    Args:
        report (VerifierReport): the report.
        mockup (MockupUnit): the mockup it was produced from.

    Returns:
        str: the summary; identical inputs give identical text.
    """
    if report.verdict == Verdict.SUCCESSFUL:
        return "No property violations found within an unwind bound of %d." % report.unwind_bound
    if report.verdict == Verdict.TIMEOUT:
        return "The verifier ran out of time after %gs without a verdict." % report.timeout
    if report.verdict == Verdict.TOOL_ERROR:
        return "The verifier could not analyze this function."
    lines = ["The verifier found %d property violation(s):" % len(report.violations)]
    for violation in report.violations:
        where = mockupLocation(violation, mockup)
        text = "- %s at %s" % (violation.property_kind.value, where)
        if violation.function:
            text += " in %s" % violation.function
        if violation.detail:
            text += ": %s" % violation.detail
        if violation.condition:
            text += " [%s]" % violation.condition
        lines.append(text)
        if violation.assignments:
            inputs = ", ".join("%s = %s" % pair for pair in violation.assignments)
            lines.append("  trace: %s" % inputs)
    return "\n".join(lines)
