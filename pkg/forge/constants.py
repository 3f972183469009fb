import os

# change these to match your toolchain. every command is a list so extra flags can be
# appended without shell quoting
PREPROCESSOR = ["cc", "-E"]
COMPILER = ["gcc"]
COVERAGE_TOOL = ["gcov"]
VERIFIER = "esbmc"
# neutralize GNU spellings the C parser doesn't know about
PREPROCESSOR_DEFINES = [
    "__attribute__(x)=",
    "__extension__=",
    "__restrict=",
    "__restrict__=",
    "__inline=inline",
    "__inline__=inline",
]
# compile flags for harnesses
COMPILE_FLAGS = ["-std=gnu99", "-O0", "-g", "-Werror=implicit-function-declaration"]
COVERAGE_FLAGS = ["--coverage"]
# verifier defaults
DEFAULT_VERIFIER_TIMEOUT = 10  # seconds
DEFAULT_UNWIND_BOUND = 8
# loops with nondeterministic bounds would otherwise report every unwinding as a failure
VERIFIER_PROPERTY_FLAGS = ["--overflow-check", "--no-unwinding-assertions"]
# storage handed to pointer parameters by the verification driver
DRIVER_BUFFER_LEN = 64
# loop defaults
DEFAULT_MAX_ITERATIONS = 4
HARD_CAP_FACTOR = 2
DEFAULT_PER_CASE_TIMEOUT = 5  # seconds
DEFAULT_PARALLELISM = 1
# ratings
RATING_MIN = 0
RATING_MAX = 8
# prompts are budgeted in characters, not tokens
DEFAULT_TOKEN_BUDGET = 32768
DEFAULT_TEMPERATURE = 0
TEMPLATE_VERSION = "v1"
TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "gateway", "templates")
# http backend retries: 1 s, 2 s, 4 s
HTTP_ATTEMPTS = 3
HTTP_BACKOFF = 1.0
HTTP_TIMEOUT = 300
# always emitted at the top of every mockup
PRELUDE_INCLUDES = ["stdio.h", "stdlib.h", "string.h", "stdint.h"]
# marker for emitted lines that don't come from an original file
SYNTHESIZED = "<synthesized>"
# harness markers
CRASH_MARKER = "// CRASH"
COMMENT_PREFIX = "// "
ASSERT_MACRO = "FORGE_ASSERT"
TEST_PREFIX = "test_"
# default output directory for runs
OUT_DIR = os.path.join(os.getcwd(), "forge_out")

class CustomError(Exception):
    # just a simple way to distinguish between python-specific errors and pipeline errors
    pass
