import pytest
from forge.gateway.backends import ScriptedBackend
from forge.harness.coverage import CoverageReport
from forge.harness.suite import build_harness
from forge.mockups.mockup import MockupUnit
from forge.reflection import (
    Decision, ErrorCounters, LoopState, VerdictSource, heuristicVerdict, reflect, should_continue,
)

MOCKUP = MockupUnit(
    target="twice",
    source_text="int twice(int x)\n{\n    return 2 * x;\n}\n",
    source_map={1: ("twice.c", 1), 2: ("twice.c", 2), 3: ("twice.c", 3), 4: ("twice.c", 4)},
)
SUITE = build_harness(MOCKUP, "void test_two(void) { FORGE_ASSERT(twice(1) == 2); }\n", iteration=1)
COVERAGE = CoverageReport(per_line={1: 1, 2: 1, 3: 0, 4: 0}, pct=50.0, uncovered=(3, 4))

def test_model_verdict():
    backend = ScriptedBackend(["RATING: 6\nPLAN: test negative numbers"])
    verdict = reflect(COVERAGE, SUITE, backend, MOCKUP)
    assert (verdict.rating, verdict.plan, verdict.source) == (6, "test negative numbers", VerdictSource.MODEL)
    prompt = backend.prompts[0]
    assert "### PRIOR TESTS" in prompt
    assert "### COVERAGE" in prompt
    assert "RATING: <0-8>" in prompt

def test_clamped_rating_is_flagged():
    verdict = reflect(COVERAGE, SUITE, ScriptedBackend(["RATING: 11\nPLAN: nothing left"]), MOCKUP)
    assert verdict.rating == 8
    assert verdict.clamped

def test_heuristic_when_the_script_runs_out():
    verdict = reflect(COVERAGE, SUITE, ScriptedBackend([]), MOCKUP)
    assert verdict.source == VerdictSource.HEURISTIC
    assert verdict.rating == 4
    assert "3, 4" in verdict.plan

def test_heuristic_when_the_answer_has_no_rating():
    verdict = reflect(COVERAGE, SUITE, ScriptedBackend(["Looks good to me."]), MOCKUP)
    assert verdict.source == VerdictSource.HEURISTIC

@pytest.mark.parametrize("pct,rating", [(0.0, 0), (12.4, 0), (12.5, 1), (99.9, 7), (100.0, 8)])
def test_heuristic_rating_floors(pct, rating):
    coverage = CoverageReport(per_line={}, pct=pct, uncovered=())
    assert heuristicVerdict(coverage, SUITE).rating == rating

def test_heuristic_without_a_suite():
    assert heuristicVerdict(None, None).rating == 0

@pytest.mark.parametrize("iteration,maximum,errors,decision", [
    (1, 4, 0, Decision.CONTINUE_LOOP),
    (3, 4, 1, Decision.CONTINUE_LOOP),
    (4, 4, 0, Decision.EXIT_SUCCESS),
    (4, 4, 1, Decision.CONTINUE_LOOP),
    (7, 4, 1, Decision.CONTINUE_LOOP),
    (6, 4, 0, Decision.EXIT_SUCCESS),
    (8, 4, 1, Decision.EXIT_BUDGET_EXHAUSTED),
    (8, 4, 0, Decision.EXIT_BUDGET_EXHAUSTED),
    (1, 1, 0, Decision.EXIT_SUCCESS),
    (2, 1, 1, Decision.EXIT_BUDGET_EXHAUSTED),
])
def test_decision_table(iteration, maximum, errors, decision):
    state = LoopState(iteration=iteration, max_iterations=maximum, last_errors=ErrorCounters(compile_errors=errors))
    assert should_continue(state) == decision

def test_max_iterations_override():
    state = LoopState(iteration=2, max_iterations=4)
    assert should_continue(state, max_iterations=2) == Decision.EXIT_SUCCESS
    assert state.hardCap == 8

def test_verdict_source_spellings():
    assert [source.value for source in VerdictSource] == ["model", "heuristic"]
