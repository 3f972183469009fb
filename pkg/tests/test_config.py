import os
import pytest
from forge.config import FatalConfig, RunConfig, load_config
from forge.constants import DEFAULT_MAX_ITERATIONS, OUT_DIR

CONFIG = """source_roots: [src]
include_dirs: include
output_dir: out
max_iterations: 3
compiler: gcc -m32
targets: [sign_of, gcd]
verifier:
  executable: esbmc
  timeout: 20
  extra_flags: [--overflow-check]
backend:
  kind: scripted
  script_dir: script
stub_policy:
  log_event: abort_on_call
  read_sensor: {return_fixed: 42}
"""

def writeConfig(tmp_path, text, name="forge.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)

def test_loading_a_config(tmp_path):
    config = load_config(writeConfig(tmp_path, CONFIG))
    assert config.source_roots == (os.path.join(str(tmp_path), "src"),)
    assert config.include_dirs == (os.path.join(str(tmp_path), "include"),)
    assert config.output_dir == os.path.join(str(tmp_path), "out")
    assert config.max_iterations == 3
    assert config.compiler == ("gcc", "-m32")
    assert config.targets == ("sign_of", "gcd")
    assert config.verifier.timeout == 20
    assert config.verifier.extra_flags == ("--overflow-check",)
    assert config.backend.script_dir == os.path.join(str(tmp_path), "script")
    assert config.stub_policy["read_sensor"] == {"return_fixed": 42}

def test_paths_resolve_against_the_config_file(tmp_path):
    nested = tmp_path / "conf"
    nested.mkdir()
    config = load_config(writeConfig(nested, "source_roots: ../legacy\n"))
    assert config.source_roots == (os.path.join(str(tmp_path), "legacy"),)

def test_empty_file_gives_defaults(tmp_path):
    config = load_config(writeConfig(tmp_path, ""))
    assert config == RunConfig()
    assert config.max_iterations == DEFAULT_MAX_ITERATIONS
    assert config.output_dir == os.path.abspath(OUT_DIR)

def test_overrides_win(tmp_path):
    config = load_config(writeConfig(tmp_path, CONFIG), {"max_iterations": 6, "output_dir": None, "targets": "sign_*"})
    assert config.max_iterations == 6
    assert config.output_dir == os.path.join(str(tmp_path), "out")
    assert config.targets == "sign_*"

def test_relative_output_override_is_pinned_to_the_working_directory(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = load_config(writeConfig(tmp_path, CONFIG), {"output_dir": "runs"})
    assert os.path.realpath(config.output_dir) == os.path.realpath(str(tmp_path / "runs"))
    assert os.path.isabs(config.output_dir)

def test_http_backend_names_only_the_credential_variable(tmp_path):
    text = "backend:\n  kind: http\n  url: http://localhost:8000/v1/chat/completions\n  model_name: coder\n  credentials_env_var: FORGE_API_KEY\n"
    backend = load_config(writeConfig(tmp_path, text)).backend
    assert backend.kind == "http"
    assert backend.credentials_env_var == "FORGE_API_KEY"

@pytest.mark.parametrize("text", [
    "max_iterations: 3\nbogus_key: 1\n",
    "max_iterations: 0\n",
    "parallelism: 0\n",
    "per_case_timeout: 0\n",
    "annotate_originals: sometimes\n",
    "targets: 7\n",
    "compiler: 12\n",
    "verifier:\n  timeout: 0\n",
    "verifier:\n  bogus: 1\n",
    "verifier:\n  grammar: klee\n",
    "- just\n- a list\n",
    "source_roots: [unclosed\n",
])
def test_invalid_configs(tmp_path, text):
    with pytest.raises(FatalConfig):
        load_config(writeConfig(tmp_path, text))

def test_invalid_override(tmp_path):
    with pytest.raises(FatalConfig):
        load_config(writeConfig(tmp_path, CONFIG), {"max_iterations": 0})

def test_missing_file(tmp_path):
    with pytest.raises(FatalConfig):
        load_config(str(tmp_path / "nowhere.yaml"))
