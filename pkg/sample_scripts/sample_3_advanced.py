import logging
import os
import time
from dataclasses import replace
from forge import *

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
start_time = time.monotonic()
here = os.path.dirname(os.path.abspath(__file__))

# the whole loop with canned model answers
def scripted_run():
    # sample_config.yaml points at legacy/ and at script/, where ring_push has a
    # generation answer, a reflection and an improved suite. the scripted backend
    # hands them out in file-name order, so this run is repeatable.
    config = load_config(os.path.join(here, "sample_config.yaml"), {"targets": ("ring_push",)})
    report = run_pipeline(config)
    # everything lands in out/advanced: the mockup, verifier.json, the harness, its
    # coverage, and session.json with one entry per iteration.
    record = load_records(config.output_dir)[0]
    for entry in record.entries:
        print(entry.iteration, entry.compile_ok, entry.coverage_pct, entry.rating, entry.decision)
    print(report.rating_pairs)
    return report

# a real model behind an OpenAI-compatible endpoint
def http_run():
    # the key is read from the environment variable named in the descriptor, never
    # from the config file. export FORGE_API_KEY before running this one.
    config = load_config(os.path.join(here, "sample_config.yaml"))
    backend = BackendDescriptor(
        kind="http", url="http://localhost:8000/v1/chat/completions",
        model_name="local-coder", credentials_env_var="FORGE_API_KEY",
    )
    config = replace(config, backend=backend, output_dir=os.path.join(here, "out", "http"))
    # two targets at a time; each one writes only under its own directory.
    config = replace(config, parallelism=2)
    return run_pipeline(config)

# recomputing the reports from what's on disk
def rereport():
    out = os.path.join(here, "out", "advanced")
    report = aggregate(load_records(out))
    emit_reports(report, out)
    print(report.toJson())


scripted_run()
# http_run()
# rereport()

timeFormatter(time.monotonic() - start_time, "Script time")
