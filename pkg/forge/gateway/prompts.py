"""
Prompt assembly. A prompt is a fixed sequence of titled sections; when it doesn't fit
the budget, the least important sections lose their tails first and the source section
is never cut.
"""
import logging
import os
from dataclasses import dataclass
from enum import Enum
from forge.constants import CustomError, DEFAULT_TOKEN_BUDGET, TEMPLATE_DIR, TEMPLATE_VERSION

log = logging.getLogger(__name__)

TRUNCATION_MARK = "\n[... truncated ...]"

class SourceTooLarge(CustomError):
    pass

class Instruction(str, Enum):
    GENERATE_TESTS = "generate_tests"
    REFLECT = "reflect"

@dataclass(frozen=True)
class PromptBundle:
    """
    Everything that goes into one prompt. Optional sections are left out when None.

    Attributes:
        mockup_source (str): the mockup C text, never truncated.
        instruction (Instruction): which template heads the prompt.
        prior_tests (str): tests from the previous iteration.
        coverage_summary (str): covered/uncovered lines of the last run.
        verifier_summary (str): sensitization summary.
        diagnostics (str): compiler output of a failed build.
        plan (str): the last reflection plan, shown above the prior tests.
        token_budget (int): prompt budget in characters.
    """
    mockup_source: str
    instruction: Instruction = Instruction.GENERATE_TESTS
    prior_tests: str = None
    coverage_summary: str = None
    verifier_summary: str = None
    diagnostics: str = None
    plan: str = None
    token_budget: int = DEFAULT_TOKEN_BUDGET

def loadTemplate(instruction, version=TEMPLATE_VERSION):
    path = os.path.join(TEMPLATE_DIR, "%s.%s.txt" % (Instruction(instruction).value, version))
    if not os.path.isfile(path):
        raise CustomError("no prompt template at %s" % path)
    with open(path, "r", encoding="utf-8") as infile:
        return infile.read().rstrip("\n")

def renderSection(title, body):
    return "### %s\n%s\n" % (title, body)

def sectionsOf(bundle, instructionText):
    """Returns [title, body] pairs in prompt order, optional sections dropped."""
    sections = [["INSTRUCTION", instructionText], ["SOURCE", bundle.mockup_source.rstrip("\n")]]
    if bundle.verifier_summary:
        sections.append(["VERIFIER", bundle.verifier_summary])
    if bundle.coverage_summary:
        sections.append(["COVERAGE", bundle.coverage_summary])
    if bundle.diagnostics:
        sections.append(["COMPILER DIAGNOSTICS", bundle.diagnostics])
    if bundle.prior_tests or bundle.plan:
        body = bundle.prior_tests or ""
        if bundle.plan:
            body = "PLAN: %s\n\n%s" % (bundle.plan, body)
        sections.append(["PRIOR TESTS", body.rstrip("\n")])
    return sections

def promptLength(sections):
    return len("\n".join(renderSection(title, body) for title, body in sections))

def assemble_prompt(bundle, template=None):
    """
    Builds the prompt text for a bundle.

    Args:
        bundle (PromptBundle): the prompt contents.
        template (str, optional): instruction text, overriding the versioned template
            file. Defaults to None.

    Raises:
        SourceTooLarge: the source section alone exceeds the budget, or nothing else
            can be cut.

    Returns:
        str: the prompt. Its length never exceeds bundle.token_budget.
    """
    instructionText = template if template is not None else loadTemplate(bundle.instruction)
    sections = sectionsOf(bundle, instructionText)
    budget = bundle.token_budget
    if len(renderSection("SOURCE", sections[1][1])) > budget:
        raise SourceTooLarge("mockup source of %d characters exceeds a budget of %d"
                             % (len(sections[1][1]), budget))
    byTitle = {section[0]: section for section in sections}
    for title in ("PRIOR TESTS", "COMPILER DIAGNOSTICS", "COVERAGE", "VERIFIER", "INSTRUCTION"):
        overflow = promptLength(sections) - budget
        if overflow <= 0:
            break
        section = byTitle.get(title)
        if section is None:
            continue
        body = section[1]
        keep = len(body) - overflow - len(TRUNCATION_MARK)
        # a body too short to carry the mark is dropped whole
        section[1] = body[:keep] + TRUNCATION_MARK if keep >= 0 else ""
        log.info("truncated %s section from %d to %d characters", title, len(body), len(section[1]))
    prompt = "\n".join(renderSection(title, body) for title, body in sections)
    if len(prompt) > budget:
        raise SourceTooLarge("prompt of %d characters doesn't fit a budget of %d"
                             % (len(prompt), budget))
    return prompt
