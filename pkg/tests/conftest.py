import os
import shutil
import stat
import pytest

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
CORPUS = os.path.join(FIXTURES, "corpus")
CRASH = os.path.join(FIXTURES, "crash")
GOLDEN = os.path.join(FIXTURES, "verifier")
NETWORK = os.path.join(FIXTURES, "network")

HAS_CC = shutil.which("cc") is not None
HAS_GCC = shutil.which("gcc") is not None
HAS_GCOV = shutil.which("gcov") is not None

needsPreprocessor = pytest.mark.skipif(not HAS_CC, reason="needs a C preprocessor (cc)")
needsCompiler = pytest.mark.skipif(not HAS_GCC, reason="needs gcc")
needsToolchain = pytest.mark.skipif(
    not (HAS_CC and HAS_GCC and HAS_GCOV), reason="needs cc, gcc and gcov"
)

def preprocessed(path, source):
    """Source text as the preprocessor would hand it over: one linemarker, no directives."""
    return '# 1 "%s"\n%s' % (path, source)

def writeExecutable(path, body):
    with open(path, "w", encoding="utf-8") as outfile:
        outfile.write("#!/bin/sh\n" + body + "\n")
    os.chmod(path, os.stat(path).st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return str(path)

def writeResponses(directory, responses):
    os.makedirs(directory, exist_ok=True)
    for i, text in enumerate(responses):
        with open(os.path.join(directory, "%03d.txt" % i), "w", encoding="utf-8") as outfile:
            outfile.write(text)
    return str(directory)

@pytest.fixture
def verifierStub(tmp_path):
    """A checker that always proves the mockup safe."""
    return writeExecutable(tmp_path / "fake-esbmc", 'echo "VERIFICATION SUCCESSFUL"\nexit 0')

@pytest.fixture
def goldenOutput():
    def read(name):
        with open(os.path.join(GOLDEN, name), "r", encoding="utf-8") as infile:
            return infile.read()
    return read
