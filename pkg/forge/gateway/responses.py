import logging
import re
from dataclasses import dataclass
from forge.constants import RATING_MAX, RATING_MIN
from forge.gateway.prompts import Instruction

log = logging.getLogger(__name__)

CODE_BLOCK = re.compile(r"```[ \t]*([A-Za-z0-9_+-]*)[ \t]*\n(.*?)```", re.DOTALL)
RATING = re.compile(r"RATING:\s*(-?\d+)")
PLAN = re.compile(r"PLAN:[ \t]*(.*)", re.DOTALL)

@dataclass(frozen=True)
class ModelResponse:
    text: str
    extracted_code: str = None
    extracted_rating: int = None
    extracted_plan: str = None
    rating_clamped: bool = False

def extractCode(text):
    """Returns the body of the first fenced code block, or None."""
    blocks = CODE_BLOCK.findall(text)
    if not blocks:
        return None
    if len(blocks) > 1:
        log.warning("response has %d code blocks, using the first", len(blocks))
    return blocks[0][1]

def extractRating(text):
    """
    Returns:
        tuple: (rating clamped into RATING_MIN..RATING_MAX, whether it was clamped),
        or (None, False) when the text has no rating.
    """
    match = RATING.search(text)
    if not match:
        return None, False
    rating = int(match.group(1))
    clamped = min(max(rating, RATING_MIN), RATING_MAX)
    if clamped != rating:
        log.warning("rating %d outside %d..%d, clamped to %d", rating, RATING_MIN, RATING_MAX, clamped)
    return clamped, clamped != rating

def extractPlan(text):
    match = PLAN.search(text)
    if not match:
        return None
    plan = match.group(1).strip()
    return plan or None

def parseResponse(text, instruction):
    """
    Pulls the parts an instruction asks for out of a raw completion.

    Args:
        text (str): the completion.
        instruction (Instruction): the instruction the prompt carried.

    Returns:
        ModelResponse: the text and whatever could be extracted.
    """
    if Instruction(instruction) == Instruction.GENERATE_TESTS:
        return ModelResponse(text=text, extracted_code=extractCode(text))
    rating, clamped = extractRating(text)
    return ModelResponse(
        text=text,
        extracted_rating=rating,
        extracted_plan=extractPlan(text),
        rating_clamped=clamped,
    )
