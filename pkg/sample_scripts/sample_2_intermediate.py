import logging
import os
import time
from forge import *

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
start_time = time.monotonic()
here = os.path.dirname(os.path.abspath(__file__))
out = os.path.join(here, "out", "intermediate")

def mockupFor(function):
    unit = parse_unit(os.path.join(here, "legacy", "ringbuf.c"), include_dirs=[os.path.join(here, "legacy")])
    graph = build_graph(unit)
    return generate_mockup(implied_closure(graph, function), unit, graph.external_unresolved, target=function)

# asking a bounded model checker where ring_pop can go wrong
def verify_ring_pop():
    mockup = mockupFor("ring_pop")
    # the verifier needs something to call ring_pop with. synthesize_driver() gives it
    # a main() with nondeterministic scalars and small buffers for the pointers.
    print(synthesize_driver(mockup))
    # esbmc has to be on PATH for this one. ten seconds, unwinding loops 8 times.
    report = run_verifier(mockup, VerifierConfig(timeout=10, unwind_bound=8), out)
    print(report.verdict.value, "in %.2fs" % report.elapsed)
    # the violations point at lines of the mockup; the summary maps them back to the
    # original file, which is what the model gets to read.
    print(sensitization_summary(report, mockup))
    return report

# building and running a suite by hand, no model involved
def run_handwritten_suite():
    mockup = mockupFor("ring_push")
    # test functions start with test_ and use FORGE_ASSERT. anything else, like this
    # helper, is kept as support code.
    code = "\n".join([
        "static struct ring fresh(void) { struct ring r; memset(&r, 0, sizeof r); return r; }",
        "void test_push_once(void) { struct ring r = fresh(); FORGE_ASSERT(ring_push(&r, 7) == 0); }",
        "void test_push_null(void) { ring_push(0, 1); }",
    ])
    suite = build_harness(mockup, code, iteration=1)
    print([case.name for case in suite.cases])
    # compile_suite() writes ring_push_test.c and builds it with gcov instrumentation.
    binary = compile_suite(suite, workDir=out)
    if isinstance(binary, CompileFailure):
        print(binary.diagnostics)
        return None
    # every case runs in its own process. the null pointer one should die of SIGSEGV.
    suite = execute_suite(binary, suite, per_case_timeout=5)
    for case in suite.cases:
        print(case.name, case.status.value, case.crash_signal or "")
    # crashed cases get commented out under a // CRASH marker, so the next build still
    # has them for the model to look at but never runs them.
    suite = disable_crashed(suite)
    print(suite.testsText)
    # and coverage is measured over the copied lines only.
    report = measure_coverage(out, mockup)
    print(coverage_summary(report, mockup))
    return suite


verify_ring_pop()
# run_handwritten_suite()

timeFormatter(time.monotonic() - start_time, "Script time")
