import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from forge.constants import DEFAULT_MAX_ITERATIONS, DEFAULT_TOKEN_BUDGET, HARD_CAP_FACTOR, RATING_MAX
from forge.gateway.backends import EndpointUnreachable, ScriptExhausted, complete
from forge.gateway.prompts import Instruction, PromptBundle, SourceTooLarge, assemble_prompt
from forge.harness.coverage import coverage_summary

log = logging.getLogger(__name__)

class VerdictSource(str, Enum):
    MODEL = "model"
    HEURISTIC = "heuristic"

class Decision(str, Enum):
    CONTINUE_LOOP = "continue_loop"
    EXIT_SUCCESS = "exit_success"
    EXIT_BUDGET_EXHAUSTED = "exit_budget_exhausted"

@dataclass(frozen=True)
class ReflectionVerdict:
    rating: int
    plan: str
    source: VerdictSource
    clamped: bool = False

@dataclass
class ErrorCounters:
    compile_errors: int = 0
    generation_errors: int = 0
    crashes: int = 0

@dataclass
class LoopState:
    """
    Where a target's improvement loop stands.

    Attributes:
        iteration (int): iterations started so far.
        max_iterations (int): the soft bound; the hard cap is HARD_CAP_FACTOR times it.
        rating_history (list): ReflectionVerdict per reflection, oldest first.
        last_errors (ErrorCounters): what went wrong in the latest iteration.
    """
    iteration: int = 0
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    rating_history: list = field(default_factory=list)
    last_errors: ErrorCounters = field(default_factory=ErrorCounters)

    @property
    def hardCap(self):
        return HARD_CAP_FACTOR * self.max_iterations

def heuristicVerdict(coverage, suite):
    """Rating from coverage alone: floor(pct / 100 * RATING_MAX)."""
    if suite is None:
        return ReflectionVerdict(0, "Produce a suite that compiles.", VerdictSource.HEURISTIC)
    pct = coverage.pct if coverage is not None else 0.0
    rating = int(math.floor(pct / 100.0 * RATING_MAX))
    if coverage is None:
        plan = "No case completed; write cases that run the function without crashing."
    elif coverage.uncovered:
        plan = "Add cases that reach mockup lines %s." % ", ".join(str(l) for l in coverage.uncovered)
    else:
        plan = "Every line is covered; add checks for boundary values and error paths."
    return ReflectionVerdict(rating, plan, VerdictSource.HEURISTIC)

def reflect(coverage, suite, backend, mockup=None, token_budget=DEFAULT_TOKEN_BUDGET):
    """
    Asks the model to rate a suite and plan the next one.

    Args:
        coverage (CoverageReport): coverage of the suite, None if nothing ran.
        suite (TestSuite): the latest suite that compiled, None if none did.
        backend (ModelBackend): the model.
        mockup (MockupUnit, optional): the mockup; taken from the suite when omitted.
        token_budget (int, optional): prompt budget. Defaults to DEFAULT_TOKEN_BUDGET.

    Returns:
        ReflectionVerdict: the model's rating and plan, or the coverage heuristic when
        the model can't be reached or its answer has no rating or plan.
    """
    mockup = mockup or (suite.mockup if suite else None)
    bundle = PromptBundle(
        mockup_source=mockup.source_text,
        instruction=Instruction.REFLECT,
        prior_tests=suite.testsText if suite else None,
        coverage_summary=coverage_summary(coverage, mockup),
        token_budget=token_budget,
    )
    try:
        response = complete(backend, assemble_prompt(bundle), Instruction.REFLECT)
    except (EndpointUnreachable, ScriptExhausted, SourceTooLarge) as err:
        log.warning("reflection on %s fell back to coverage: %s", mockup.target, err)
        return heuristicVerdict(coverage, suite)
    if response.extracted_rating is None or response.extracted_plan is None:
        log.warning("reflection on %s had no RATING/PLAN, using coverage", mockup.target)
        return heuristicVerdict(coverage, suite)
    return ReflectionVerdict(
        rating=response.extracted_rating,
        plan=response.extracted_plan,
        source=VerdictSource.MODEL,
        clamped=response.rating_clamped,
    )

def should_continue(state, max_iterations=None):
    """
    Decides whether the loop runs another iteration. Past max_iterations it stops as
    soon as an iteration builds without errors, and never goes past the hard cap.

    Args:
        state (LoopState): the loop state after an iteration.
        max_iterations (int, optional): overrides state.max_iterations.

    Returns:
        Decision: the decision.
    """
    bound = max_iterations or state.max_iterations
    if state.iteration >= HARD_CAP_FACTOR * bound:
        return Decision.EXIT_BUDGET_EXHAUSTED
    if state.iteration >= bound and state.last_errors.compile_errors == 0:
        return Decision.EXIT_SUCCESS
    return Decision.CONTINUE_LOOP
