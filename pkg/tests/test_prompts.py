import pytest
from forge.gateway.prompts import (
    Instruction, PromptBundle, SourceTooLarge, TRUNCATION_MARK, assemble_prompt,
)
from forge.gateway.responses import parseResponse

SOURCE = "int twice(int x)\n{\n    return 2 * x;\n}\n"

def fullBundle(**changes):
    values = dict(
        mockup_source=SOURCE,
        prior_tests="void test_twice(void) { FORGE_ASSERT(twice(2) == 4); }\n" * 40,
        coverage_summary="3 of 3 executable lines covered (100.0%).",
        verifier_summary="No property violations found within an unwind bound of 8.",
        diagnostics="harness.c:12:5: error: expected ';' before '}' token",
        plan="Check negative inputs.",
        token_budget=100000,
    )
    values.update(changes)
    return PromptBundle(**values)

def test_sections_in_order():
    prompt = assemble_prompt(fullBundle(), template="Write tests.")
    titles = [line for line in prompt.split("\n") if line.startswith("### ")]
    assert titles == [
        "### INSTRUCTION", "### SOURCE", "### VERIFIER", "### COVERAGE",
        "### COMPILER DIAGNOSTICS", "### PRIOR TESTS",
    ]
    assert "### PRIOR TESTS\nPLAN: Check negative inputs.\n\nvoid test_twice" in prompt

def test_optional_sections_left_out():
    prompt = assemble_prompt(PromptBundle(mockup_source=SOURCE), template="Write tests.")
    assert prompt == "### INSTRUCTION\nWrite tests.\n\n### SOURCE\n" + SOURCE

def test_default_template_is_versioned_file():
    prompt = assemble_prompt(PromptBundle(mockup_source=SOURCE))
    assert prompt.startswith("### INSTRUCTION\nYou are writing unit tests")
    reflect = assemble_prompt(PromptBundle(mockup_source=SOURCE, instruction=Instruction.REFLECT))
    assert "RATING: <0-8>" in reflect

def test_prior_tests_truncated_first():
    bundle = fullBundle()
    full = assemble_prompt(bundle, template="Write tests.")
    budget = int(len(full) / 1.1)
    prompt = assemble_prompt(fullBundle(token_budget=budget), template="Write tests.")
    assert len(prompt) == budget
    assert prompt.count(TRUNCATION_MARK) == 1
    for kept in (SOURCE.rstrip("\n"), bundle.verifier_summary, bundle.coverage_summary, bundle.diagnostics):
        assert kept in prompt
    assert prompt.endswith(TRUNCATION_MARK + "\n")

def test_later_sections_go_when_prior_tests_run_out():
    bundle = fullBundle(prior_tests="short", diagnostics="d" * 2000)
    full = assemble_prompt(bundle, template="Write tests.")
    prompt = assemble_prompt(fullBundle(prior_tests="short", diagnostics="d" * 2000,
                                        token_budget=len(full) - 1000), template="Write tests.")
    assert len(prompt) <= len(full) - 1000
    assert SOURCE.rstrip("\n") in prompt
    assert bundle.verifier_summary in prompt
    assert "d" * 900 in prompt

def test_source_never_cut():
    with pytest.raises(SourceTooLarge):
        assemble_prompt(PromptBundle(mockup_source="x" * 500, token_budget=100), template="Write tests.")

def test_generation_response_takes_first_block():
    text = "Here.\n```c\nvoid test_a(void) {}\n```\nand\n```c\nvoid test_b(void) {}\n```\n"
    response = parseResponse(text, Instruction.GENERATE_TESTS)
    assert response.extracted_code == "void test_a(void) {}\n"
    assert parseResponse("no code here", Instruction.GENERATE_TESTS).extracted_code is None

def test_reflection_response():
    response = parseResponse("RATING: 6\nPLAN: cover the error path", Instruction.REFLECT)
    assert (response.extracted_rating, response.extracted_plan, response.rating_clamped) == (6, "cover the error path", False)

def test_out_of_range_ratings_are_clamped():
    high = parseResponse("RATING: 12\nPLAN: more", Instruction.REFLECT)
    low = parseResponse("RATING: -3\nPLAN: more", Instruction.REFLECT)
    assert (high.extracted_rating, high.rating_clamped) == (8, True)
    assert (low.extracted_rating, low.rating_clamped) == (0, True)

def test_missing_rating_and_plan():
    response = parseResponse("I think the tests are fine.", Instruction.REFLECT)
    assert response.extracted_rating is None
    assert response.extracted_plan is None
