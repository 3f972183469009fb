import json
import os
import shutil
import pytest
from conftest import CORPUS, CRASH, needsPreprocessor, needsToolchain, writeExecutable, writeResponses
from forge.config import FatalConfig, RunConfig
from forge.gateway.backends import BackendDescriptor
from forge.harness.suite import uncomment
from forge.pipeline import FinalStatus, discoverTargets, load_records, run_pipeline
from forge.verifier.checker import VerifierConfig

# one suite per corpus target that reaches every line of its mockup
SUITES = {
    "scale_percent": "void test_scale(void)\n{\n    FORGE_ASSERT(scale_percent(50, 50) == 25);\n"
                     "    FORGE_ASSERT(scale_percent(100000, 100) == 1000);\n"
                     "    FORGE_ASSERT(scale_percent(-100000, 100) == -1000);\n}\n",
    "sign_of": "void test_signs(void)\n{\n    FORGE_ASSERT(sign_of(-2) == -1);\n"
               "    FORGE_ASSERT(sign_of(0) == 0);\n    FORGE_ASSERT(sign_of(9) == 1);\n}\n",
    "gcd": "void test_gcd(void)\n{\n    FORGE_ASSERT(gcd(12, 8) == 4);\n    FORGE_ASSERT(gcd(7, 0) == 7);\n}\n",
    "abs_diff": "void test_abs_diff(void)\n{\n    FORGE_ASSERT(abs_diff(5, 3) == 2);\n"
                "    FORGE_ASSERT(abs_diff(3, 5) == 2);\n}\n",
    "sum_array": "void test_sum(void)\n{\n    int v[3] = {1, 2, 3};\n    FORGE_ASSERT(sum_array(v, 3) == 6);\n}\n",
    "checksum": "void test_checksum(void)\n{\n    const unsigned char d[1] = {0};\n"
                "    FORGE_ASSERT(checksum(d, 1) == 0xb4);\n    FORGE_ASSERT(checksum(NULL, 0) == 0);\n}\n",
    "first_negative": "void test_first_negative(void)\n{\n    int v[2] = {1, -2};\n    int w[2] = {1, 2};\n"
                      "    size_t at = 0;\n    FORGE_ASSERT(first_negative(v, 2, &at) == 1);\n    FORGE_ASSERT(at == 1);\n"
                      "    FORGE_ASSERT(first_negative(w, 2, &at) == 0);\n}\n",
    "count_char": "void test_count(void)\n{\n    FORGE_ASSERT(count_char(\"banana\", 'a') == 3);\n}\n",
    "is_palindrome": "void test_palindrome(void)\n{\n    FORGE_ASSERT(is_palindrome(\"abba\") == 1);\n"
                     "    FORGE_ASSERT(is_palindrome(\"abc\") == 0);\n}\n",
    "to_upper": "void test_upper(void)\n{\n    char s[] = \"abC\";\n    to_upper(s);\n"
                "    FORGE_ASSERT(strcmp(s, \"ABC\") == 0);\n}\n",
}

BROKEN = "void test_broken(void)\n{\n    FORGE_ASSERT(sign_of(1) == 1)\n}\n"

def generation(code):
    return "Here are the tests.\n```c\n%s```\n" % code

def reflection(rating):
    return "RATING: %d\nPLAN: cover the remaining branches\n" % rating

def makeConfig(tmp_path, verifier, roots, **values):
    script = tmp_path / "script"
    script.mkdir(exist_ok=True)
    values.setdefault("output_dir", str(tmp_path / "out"))
    timeout = values.pop("verifier_timeout", 10)
    return RunConfig(
        source_roots=tuple(roots),
        verifier=VerifierConfig(executable=verifier, timeout=timeout),
        backend=BackendDescriptor(kind="scripted", script_dir=str(script)),
        **values
    )

def script(tmp_path, target, responses):
    writeResponses(tmp_path / "script" / target, responses)

def readBytes(path):
    with open(path, "rb") as infile:
        return infile.read()

@needsToolchain
def test_whole_corpus(tmp_path, verifierStub):
    for target, code in SUITES.items():
        script(tmp_path, target, [
            generation(code), reflection(3), generation(code), reflection(5),
            generation(code), reflection(7), generation(code),
        ])
    config = makeConfig(tmp_path, verifierStub, [CORPUS], parallelism=2)
    report = run_pipeline(config)
    assert report.n_targets == 10
    assert report.allCompleted
    assert report.counters["compile_errors_total"] == 0
    assert sum(1 for row in report.rows if row.coverage_pct == 100.0) >= 9
    assert report.n_improved == 10
    assert report.median_gain == 4
    # every target took three cycles
    assert report.pearson_r is None
    records = load_records(config.output_dir)
    assert all(len(record.entries) == 4 for record in records)
    assert all(record.ratings == [3, 5, 7] for record in records)
    for name in ("summary.json", "targets.csv", "initial_vs_final.csv", "cycles_vs_gain.csv"):
        assert os.path.isfile(os.path.join(config.output_dir, name))
    for suffix in ("_mockup.c", "_mockup.map.json", "_test.c", "_coverage.json"):
        assert os.path.isfile(os.path.join(config.output_dir, "checksum", "checksum" + suffix))
    assert os.path.isfile(os.path.join(config.output_dir, "checksum", "verifier.json"))

@needsToolchain
def test_recovers_from_a_compile_error(tmp_path, verifierStub):
    script(tmp_path, "sign_of", [generation(BROKEN), reflection(2), generation(SUITES["sign_of"])])
    config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")],
                        targets=("sign_of",), max_iterations=2)
    report = run_pipeline(config)
    record = load_records(config.output_dir)[0]
    assert record.final_status == FinalStatus.COMPLETED
    assert [entry.compile_ok for entry in record.entries] == [False, True]
    assert record.ratings == [2]
    assert report.counters["compile_errors_total"] == 1

@needsToolchain
def test_crashing_case_is_disabled(tmp_path, verifierStub):
    nullCase = "void test_null_entry(void) { FORGE_ASSERT(entry_value(NULL, -1) == -1); }"
    code = (
        "void test_found(void) { struct entry e = {\"k\", 7}; FORGE_ASSERT(entry_value(&e, -1) == 7); }\n"
        "void test_missing_key(void) { struct entry e = {NULL, 7}; FORGE_ASSERT(entry_value(&e, -1) == -1); }\n"
        + nullCase + "\n"
    )
    script(tmp_path, "entry_value", [generation(code)])
    config = makeConfig(tmp_path, verifierStub, [CRASH], max_iterations=1)
    report = run_pipeline(config)
    assert report.counters["crash_tests_total"] == 1
    record = load_records(config.output_dir)[0]
    assert record.final_status == FinalStatus.COMPLETED
    assert record.entries[0].verdicts == {
        "test_found": "passed", "test_missing_key": "passed", "test_null_entry": "disabled_crash",
    }
    with open(os.path.join(config.output_dir, "entry_value", "entry_value_test.c")) as infile:
        harness = infile.read()
    assert harness.count("// CRASH") == 1
    lines = harness.split("\n")
    start = next(i for i, line in enumerate(lines) if line.startswith("// CRASH"))
    assert uncomment("\n".join(lines[start:start + 2])) == nullCase

@needsToolchain
def test_verifier_timeout_doesnt_stop_generation(tmp_path):
    slow = writeExecutable(tmp_path / "slow-esbmc", "sleep 30")
    script(tmp_path, "sign_of", [generation(SUITES["sign_of"])])
    config = makeConfig(tmp_path, slow, [os.path.join(CORPUS, "arith.c")],
                        targets=("sign_of",), max_iterations=1, verifier_timeout=1)
    report = run_pipeline(config)
    record = load_records(config.output_dir)[0]
    assert record.verifier_verdict == "timeout"
    assert record.final_status == FinalStatus.COMPLETED
    assert report.counters["verifier_timeouts_total"] == 1

@needsToolchain
def test_hard_cap_on_a_suite_that_never_compiles(tmp_path, verifierStub):
    responses = []
    for _ in range(7):
        responses += [generation(BROKEN), reflection(1)]
    script(tmp_path, "sign_of", responses + [generation(BROKEN)])
    config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")], targets=("sign_of",))
    run_pipeline(config)
    record = load_records(config.output_dir)[0]
    assert record.final_status == FinalStatus.NEVER_COMPILED
    assert len(record.entries) == 8
    assert record.entries[-1].decision == "exit_budget_exhausted"
    assert record.ratings == [1] * 7

@needsToolchain
def test_runs_are_deterministic(tmp_path, verifierStub):
    for target in ("sign_of", "gcd"):
        script(tmp_path, target, [generation(SUITES[target]), reflection(4), generation(SUITES[target])])
    outputs = []
    for name in ("first", "second"):
        config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")],
                            targets=("sign_of", "gcd"), max_iterations=2, output_dir=str(tmp_path / name))
        run_pipeline(config)
        outputs.append(config.output_dir)
    for name in ("summary.json", "targets.csv", "initial_vs_final.csv", "cycles_vs_gain.csv"):
        assert readBytes(os.path.join(outputs[0], name)) == readBytes(os.path.join(outputs[1], name))

@needsToolchain
def test_completed_targets_are_skipped_on_rerun(tmp_path, verifierStub):
    script(tmp_path, "sign_of", [generation(SUITES["sign_of"])])
    config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")],
                        targets=("sign_of",), max_iterations=1)
    first = run_pipeline(config)
    session = os.path.join(config.output_dir, "sign_of", "session.json")
    before = readBytes(session)
    second = run_pipeline(config)
    assert readBytes(session) == before
    assert second == first

@needsToolchain
def test_a_failing_target_doesnt_affect_the_others(tmp_path, verifierStub):
    script(tmp_path, "sign_of", [generation(SUITES["sign_of"])])
    config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")],
                        targets=("sign_of", "gcd"), max_iterations=1, parallelism=2)
    report = run_pipeline(config)
    statuses = {row.target: row.final_status for row in report.rows}
    assert statuses == {"gcd": "errored", "sign_of": "completed"}
    gcd = next(record for record in load_records(config.output_dir) if record.target == "gcd")
    assert "ScriptExhausted" in gcd.error
    assert not report.allCompleted

def test_missing_tools_are_fatal(tmp_path):
    config = makeConfig(tmp_path, str(tmp_path / "no-such-verifier"), [CORPUS])
    with pytest.raises(FatalConfig):
        run_pipeline(config)

@needsPreprocessor
def test_discovery_keys_and_parse_failures(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    (src / "a.c").write_text("int helper(void) { return 1; }\nint dup(void) { return 1; }\n")
    (src / "b.c").write_text("int dup(void) { return 2; }\nint main(void) { return dup(); }\n")
    (src / "bad.c").write_text("int broken(void) { int x = ; return x; }\n")
    config = makeConfig(tmp_path, "esbmc", [str(src)])
    targets, units, failures = discoverTargets(config)
    assert [target.key for target in targets] == ["helper", "dup__a", "dup__b"]
    assert [target.function for target in targets] == ["helper", "dup", "dup"]
    assert len(units) == 2
    assert [(record.target, record.final_status) for record in failures] == [("bad", FinalStatus.PARSE_FAILED)]
    globbed = makeConfig(tmp_path, "esbmc", [str(src)], targets="du*")
    assert [target.key for target in discoverTargets(globbed)[0]] == ["dup__a", "dup__b"]

def test_missing_source_root(tmp_path):
    with pytest.raises(FatalConfig):
        discoverTargets(makeConfig(tmp_path, "esbmc", [str(tmp_path / "nowhere")]))

@needsToolchain
def test_selector_matching_nothing(tmp_path, verifierStub):
    config = makeConfig(tmp_path, verifierStub, [CORPUS], targets="no_such_*")
    report = run_pipeline(config)
    assert report.n_targets == 0
    assert report.counters == {"compile_errors_total": 0, "crash_tests_total": 0, "verifier_timeouts_total": 0}
    assert os.path.isfile(os.path.join(config.output_dir, "summary.json"))

CRASHING = (
    "void test_found(void) { struct entry e = {\"k\", 7}; FORGE_ASSERT(entry_value(&e, -1) == 7); }\n"
    "void test_null_entry(void) { FORGE_ASSERT(entry_value(NULL, -1) == -1); }\n"
)

@needsToolchain
def test_crashes_are_traced_to_the_original_line(tmp_path, verifierStub):
    script(tmp_path, "entry_value", [generation(CRASHING)])
    config = makeConfig(tmp_path, verifierStub, [CRASH], max_iterations=1)
    run_pipeline(config)
    with open(os.path.join(config.output_dir, "entry_value", "annotations.json")) as infile:
        annotations = json.load(infile)
    assert not annotations["applied"]
    [edit] = annotations["edits"]
    assert (edit["file"], edit["line"]) == (os.path.join(CRASH, "lookup.c"), 8)
    assert edit["text"].startswith("CRASH: test_null_entry")
    assert load_records(config.output_dir)[0].annotations == 1

@needsToolchain
def test_annotations_applied_once(tmp_path, verifierStub):
    src = tmp_path / "src"
    src.mkdir()
    shutil.copy(os.path.join(CRASH, "lookup.c"), str(src / "lookup.c"))
    script(tmp_path, "entry_value", [generation(CRASHING)])
    config = makeConfig(tmp_path, verifierStub, [str(src)], max_iterations=1, annotate_originals=True)
    run_pipeline(config)
    run_pipeline(config)
    lines = (src / "lookup.c").read_text().split("\n")
    assert lines[7].startswith("// CRASH: test_null_entry")
    assert lines[8] == "int entry_value(const struct entry *e, int fallback)"
    assert sum(1 for line in lines if "CRASH" in line) == 1

@needsToolchain
def test_progress_survives_a_model_failure(tmp_path, verifierStub):
    script(tmp_path, "sign_of", [generation(SUITES["sign_of"]), reflection(5)])
    config = makeConfig(tmp_path, verifierStub, [os.path.join(CORPUS, "arith.c")],
                        targets=("sign_of",), max_iterations=2)
    report = run_pipeline(config)
    record = load_records(config.output_dir)[0]
    assert record.final_status == FinalStatus.ERRORED
    assert "ScriptExhausted" in record.error
    assert len(record.entries) == 1
    assert record.entries[0].compile_ok
    assert record.ratings == [5]
    assert record.final_coverage is not None
    assert report.rows[0].final_status == "errored"
