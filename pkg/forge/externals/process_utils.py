import logging
import os
import shutil
import signal
import subprocess
import time
from dataclasses import dataclass

log = logging.getLogger(__name__)

@dataclass
class ProcessResult:
    returncode: int
    stdout: str
    stderr: str
    timedOut: bool
    elapsed: float

    @property
    def output(self):
        # stdout then stderr, the way a terminal would interleave them for most tools
        return self.stdout + self.stderr

def findExecutable(command):
    """
    Resolves the first element of a command line on the executable search path.

    Args:
        command (str/list): an executable name or path, or a command line list.

    Returns:
        str/None: absolute path of the executable, or None if it can't be found.
    """
    name = command[0] if isinstance(command, (list, tuple)) else command
    if os.path.sep in name:
        return os.path.abspath(name) if os.access(name, os.X_OK) else None
    return shutil.which(name)

def killGroup(proc):
    # the child runs in its own session, so its pid is also its process group id
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except ProcessLookupError:
        pass

def runBounded(command, timeout=None, cwd=None):
    """
    Runs a command to completion or until the timeout, whichever comes first. On timeout
    the whole process group is killed so grandchildren holding the output pipes can't keep
    the call alive past the bound.

    Args:
        command (list): command line.
        timeout (float, optional): seconds before the process group is killed. Defaults to
            None (no bound).
        cwd (str, optional): working directory. Defaults to None.

    Returns:
        ProcessResult: exit status, decoded output, whether the timeout fired, and elapsed
        wall-clock seconds.
    """
    log.debug("running %s", " ".join(str(c) for c in command))
    start = time.monotonic()
    proc = subprocess.Popen(
        [str(c) for c in command],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        stdin=subprocess.DEVNULL,
        cwd=cwd,
        start_new_session=True,
    )
    timedOut = False
    try:
        out, err = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        timedOut = True
        killGroup(proc)
        out, err = proc.communicate()
    elapsed = time.monotonic() - start
    return ProcessResult(
        returncode=proc.returncode,
        stdout=out.decode("utf-8", errors="replace"),
        stderr=err.decode("utf-8", errors="replace"),
        timedOut=timedOut,
        elapsed=elapsed,
    )
