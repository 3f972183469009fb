"""
Run configuration: a flat YAML file whose keys are the RunConfig fields, with command
line overrides on top. Defaults come from forge.constants.
"""
import logging
import os
from dataclasses import dataclass, field, fields, replace
import yaml
from forge.constants import (
    COMPILE_FLAGS, COMPILER, COVERAGE_TOOL, CustomError, DEFAULT_MAX_ITERATIONS,
    DEFAULT_PARALLELISM, DEFAULT_PER_CASE_TIMEOUT, DEFAULT_TOKEN_BUDGET, OUT_DIR,
    PRELUDE_INCLUDES, PREPROCESSOR,
)
from forge.gateway.backends import BackendDescriptor
from forge.verifier.checker import VerifierConfig

log = logging.getLogger(__name__)

class FatalConfig(CustomError):
    pass

@dataclass(frozen=True)
class RunConfig:
    source_roots: tuple = ()
    targets: object = "all"
    verifier: VerifierConfig = field(default_factory=VerifierConfig)
    backend: BackendDescriptor = field(default_factory=BackendDescriptor)
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    compiler: tuple = tuple(COMPILER)
    compile_flags: tuple = tuple(COMPILE_FLAGS)
    coverage_tool: tuple = tuple(COVERAGE_TOOL)
    preprocessor: tuple = tuple(PREPROCESSOR)
    include_dirs: tuple = ()
    defines: tuple = ()
    output_dir: str = OUT_DIR
    parallelism: int = DEFAULT_PARALLELISM
    per_case_timeout: float = DEFAULT_PER_CASE_TIMEOUT
    token_budget: int = DEFAULT_TOKEN_BUDGET
    prelude_includes: tuple = tuple(PRELUDE_INCLUDES)
    stub_policy: dict = field(default_factory=dict)
    annotate_originals: bool = False

    def __post_init__(self):
        # target work dirs double as the cwd of every tool run
        object.__setattr__(self, "output_dir", os.path.abspath(self.output_dir))
        if self.max_iterations < 1:
            raise FatalConfig("max_iterations must be at least 1")
        if self.parallelism < 1:
            raise FatalConfig("parallelism must be at least 1")
        if self.per_case_timeout <= 0:
            raise FatalConfig("per_case_timeout must be positive")
        if not (self.targets == "all" or isinstance(self.targets, (str, list, tuple))):
            raise FatalConfig("targets must be 'all', a glob or a list of names")
        if not isinstance(self.annotate_originals, bool):
            raise FatalConfig("annotate_originals must be true or false")

def asCommand(value, key):
    if isinstance(value, str):
        return tuple(value.split())
    if isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value):
        return tuple(value)
    raise FatalConfig("%s must be a command string or list" % key)

def resolvePaths(paths, baseDir):
    if isinstance(paths, str):
        paths = [paths]
    return tuple(os.path.normpath(os.path.join(baseDir, p)) for p in paths)

def configFromMapping(data, baseDir="."):
    """
    Builds a RunConfig from a parsed config file.

    Args:
        data (dict): the mapping.
        baseDir (str, optional): relative paths resolve against it. Defaults to ".".

    Raises:
        FatalConfig: unknown keys or invalid values.

    Returns:
        RunConfig: the configuration.
    """
    if not isinstance(data, dict):
        raise FatalConfig("config must be a mapping")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise FatalConfig("unknown config keys: %s" % ", ".join(unknown))
    values = dict(data)
    try:
        if "source_roots" in values:
            values["source_roots"] = resolvePaths(values["source_roots"], baseDir)
        if "include_dirs" in values:
            values["include_dirs"] = resolvePaths(values["include_dirs"], baseDir)
        if "output_dir" in values:
            values["output_dir"] = os.path.normpath(os.path.join(baseDir, values["output_dir"]))
        for key in ("compiler", "coverage_tool", "preprocessor"):
            if key in values:
                values[key] = asCommand(values[key], key)
        for key in ("compile_flags", "defines", "prelude_includes"):
            if key in values:
                values[key] = tuple(values[key])
        if isinstance(values.get("targets"), list):
            values["targets"] = tuple(values["targets"])
        if "verifier" in values:
            verifier = dict(values["verifier"] or {})
            if "extra_flags" in verifier:
                verifier["extra_flags"] = tuple(verifier["extra_flags"])
            values["verifier"] = VerifierConfig(**verifier)
        if "backend" in values:
            backend = dict(values["backend"] or {})
            if backend.get("script_dir"):
                backend["script_dir"] = os.path.normpath(os.path.join(baseDir, backend["script_dir"]))
            values["backend"] = BackendDescriptor(**backend)
        return RunConfig(**values)
    except FatalConfig:
        raise
    except (CustomError, TypeError, ValueError) as err:
        raise FatalConfig("invalid config: %s" % err)

def load_config(path, overrides=None):
    """
    Reads a YAML config file and applies overrides.

    Args:
        path (str): the config file.
        overrides (dict, optional): RunConfig field values that win over the file.

    Raises:
        FatalConfig: the file is missing, malformed or invalid.

    Returns:
        RunConfig: the configuration.
    """
    if not os.path.isfile(path):
        raise FatalConfig("no config file at %s" % path)
    with open(path, "r", encoding="utf-8") as infile:
        try:
            data = yaml.safe_load(infile) or {}
        except yaml.YAMLError as err:
            raise FatalConfig("cannot parse %s: %s" % (path, err))
    config = configFromMapping(data, os.path.dirname(os.path.abspath(path)))
    if overrides:
        try:
            config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
        except (CustomError, TypeError, ValueError) as err:
            raise FatalConfig("invalid override: %s" % err)
    log.debug("config: %s", config)
    return config
