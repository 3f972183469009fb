import os
import pytest
from conftest import CORPUS, needsToolchain, writeResponses
from forge.cli import backendOverride, buildParser, main, targetsOverride
from forge.config import FatalConfig
from forge.gateway.backends import BackendDescriptor
from forge.pipeline import FinalStatus, SessionRecord, writeRecord

def persist(out, target, status, ratings=(3, 5)):
    record = SessionRecord(target=target, ratings=list(ratings), final_status=status)
    writeRecord(record, os.path.join(str(out), target, "session.json"))

def test_report_of_a_completed_run(tmp_path, capsys):
    persist(tmp_path, "sign_of", FinalStatus.COMPLETED)
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert os.path.isfile(str(tmp_path / "summary.json"))
    printed = capsys.readouterr().out
    assert "targets: 1" in printed
    assert "improvement rate: 100.0%" in printed

def test_report_with_unfinished_targets(tmp_path):
    persist(tmp_path, "sign_of", FinalStatus.COMPLETED)
    persist(tmp_path, "gcd", FinalStatus.BUDGET_EXHAUSTED, ratings=(4, 4))
    assert main(["report", "--out", str(tmp_path)]) == 2

def test_missing_config_is_a_configuration_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 1

def test_bad_backend_flag(tmp_path):
    config = tmp_path / "forge.yaml"
    config.write_text("max_iterations: 1\n")
    assert main(["run", "--config", str(config), "--backend", "carrier-pigeon"]) == 1

def test_run_needs_a_config():
    with pytest.raises(SystemExit):
        buildParser().parse_args(["run"])

def test_target_selection():
    assert targetsOverride(None) is None
    assert targetsOverride("sign_of, gcd") == ("sign_of", "gcd")
    assert targetsOverride("sign_*") == "sign_*"

def test_backend_selection():
    current = BackendDescriptor(kind="scripted", script_dir="x", url="http://localhost:1", model_name="m")
    assert backendOverride(None, current) is None
    assert backendOverride("scripted:/tmp/script", current) == BackendDescriptor(kind="scripted", script_dir="/tmp/script")
    assert backendOverride("http", current).url == "http://localhost:1"
    with pytest.raises(FatalConfig):
        backendOverride("scripted", current)

@needsToolchain
def test_full_run_from_the_command_line(tmp_path, verifierStub, capsys):
    script = writeResponses(tmp_path / "script" / "sign_of", [
        "```c\nvoid test_signs(void)\n{\n    FORGE_ASSERT(sign_of(-2) == -1);\n"
        "    FORGE_ASSERT(sign_of(0) == 0);\n    FORGE_ASSERT(sign_of(9) == 1);\n}\n```\n",
    ])
    config = tmp_path / "forge.yaml"
    config.write_text(
        "source_roots: [%s]\nverifier:\n  executable: %s\nbackend:\n  kind: scripted\n  script_dir: %s\n"
        % (os.path.join(CORPUS, "arith.c"), verifierStub, os.path.dirname(script))
    )
    out = tmp_path / "out"
    code = main(["run", "--config", str(config), "--targets", "sign_of", "--max-iter", "1", "--out", str(out)])
    assert code == 0
    assert os.path.isfile(str(out / "sign_of" / "sign_of_test.c"))
    assert os.path.isfile(str(out / "targets.csv"))
    assert "targets: 1" in capsys.readouterr().out

@needsToolchain
def test_relative_output_directory(tmp_path, verifierStub, monkeypatch):
    script = writeResponses(tmp_path / "script" / "sign_of", [
        "```c\nvoid test_zero(void)\n{\n    FORGE_ASSERT(sign_of(0) == 0);\n}\n```\n",
    ])
    config = tmp_path / "forge.yaml"
    config.write_text(
        "source_roots: [%s]\nverifier:\n  executable: %s\nbackend:\n  kind: scripted\n  script_dir: %s\n"
        % (os.path.join(CORPUS, "arith.c"), verifierStub, os.path.dirname(script))
    )
    monkeypatch.chdir(tmp_path)
    code = main(["run", "--config", str(config), "--targets", "sign_of", "--max-iter", "1", "--out", "rel_out"])
    assert code == 0
    assert os.path.isfile(str(tmp_path / "rel_out" / "sign_of" / "sign_of_test.c"))
    assert os.path.isfile(str(tmp_path / "rel_out" / "sign_of" / "sign_of_coverage.json"))
