import logging
import os
import time
from forge import *

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
start_time = time.monotonic()
here = os.path.dirname(os.path.abspath(__file__))
out = os.path.join(here, "out", "beginner")

# from a legacy C file to a mockup you can compile on its own
def parse_and_slice():
    # let's start with the ring buffer in legacy/. parse_unit() runs the preprocessor
    # first, so we have to tell it where ringbuf.h lives.
    unit = parse_unit(os.path.join(here, "legacy", "ringbuf.c"), include_dirs=[os.path.join(here, "legacy")])
    # which functions could we test? discover_functions() lists the defined external
    # ones. ring_slot is static, so it shouldn't show up here.
    print(discover_functions(unit))
    # each symbol remembers where it came from in the original file. let's look at
    # ring_push - the span is in preprocessed lines, origin is the real file and line.
    push = unit.symbol("ring_push")
    print(push.signature, push.span, push.origin)
    print(push.references)
    # the references are just names. build_graph() turns them into edges, and tells us
    # what the file uses but never defines: ring_overflow_hook lives somewhere else.
    graph = build_graph(unit)
    print(graph.external_unresolved)
    # the implied closure of ring_push is everything it needs to compile: the struct,
    # the static helper, the counter, the hook's prototype. dependencies come first.
    closure = implied_closure(graph, "ring_push")
    print(closure)
    # now for the mockup. the hook gets a stub that returns zero (it's void, so it just
    # returns), and everything is copied in dependency order.
    mockup = generate_mockup(closure, unit, graph.external_unresolved, target="ring_push")
    print(mockup.source_text)
    # every copied line maps back to ringbuf.c. let's check the line with the modulo.
    for line in mockup.mappedLines():
        if "% RING_CAPACITY" in mockup.source_text.split("\n")[line - 1]:
            print(line, "->", map_back(mockup, line))
    # stubs are synthesized, so mapping them back fails loudly instead of guessing.
    # finally, let's write it out next to its source map.
    print(write_mockup(mockup, out))
    return mockup

# stub policies: what do the stand-ins do?
def stub_policies():
    unit = parse_unit(os.path.join(here, "legacy", "ringbuf.c"), include_dirs=[os.path.join(here, "legacy")])
    graph = build_graph(unit)
    closure = implied_closure(graph, "ring_push")
    # let's make the hook abort, so any test that reaches the overflow branch crashes.
    # it's a good way of finding out which tests get that far.
    mockup = generate_mockup(
        closure, unit, graph.external_unresolved,
        stub_policy={"ring_overflow_hook": "abort_on_call"}, target="ring_push",
    )
    for stub in mockup.stubs:
        print(stub.name, stub.behavior.value)
    return mockup


parse_and_slice()
# stub_policies()

timeFormatter(time.monotonic() - start_time, "Script time")
