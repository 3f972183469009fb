import glob
import logging
import os
import threading
import time
from dataclasses import dataclass
import requests
from forge.constants import (
    CustomError, DEFAULT_TEMPERATURE, HTTP_ATTEMPTS, HTTP_BACKOFF, HTTP_TIMEOUT,
)
from forge.gateway.responses import parseResponse

log = logging.getLogger(__name__)

class EndpointUnreachable(CustomError):
    pass

class ScriptExhausted(CustomError):
    pass

class ModelBackend(object):
    """A chat model that turns a prompt into a completion."""
    name = "backend"

    def complete(self, prompt):
        raise NotImplementedError

    def forTarget(self, target):
        """Backend to use for one target; most backends are shared."""
        return self

class HttpBackend(ModelBackend):
    name = "http"

    def __init__(self, url, model_name, credentials_env_var=None, temperature=DEFAULT_TEMPERATURE,
                 attempts=HTTP_ATTEMPTS, backoff=HTTP_BACKOFF, timeout=HTTP_TIMEOUT, session=None):
        """
        Talks to an OpenAI-style chat completions endpoint.

        Args:
            url (str): the endpoint URL.
            model_name (str): model identifier sent with every request.
            credentials_env_var (str, optional): environment variable holding the API
                key. Defaults to None (no Authorization header).
            temperature (float, optional): sampling temperature. Defaults to
                DEFAULT_TEMPERATURE.
            attempts (int, optional): tries per prompt. Defaults to HTTP_ATTEMPTS.
            backoff (float, optional): first retry delay in seconds, doubled on every
                retry. Defaults to HTTP_BACKOFF.
            timeout (float, optional): per-request timeout in seconds. Defaults to
                HTTP_TIMEOUT.
            session (requests.Session, optional): session to send requests with.
        """
        self.url = url
        self.modelName = model_name
        self.credentialsEnvVar = credentials_env_var
        self.temperature = temperature
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout
        self.session = session or requests.Session()

    def headers(self):
        headers = {"Content-Type": "application/json"}
        if self.credentialsEnvVar:
            key = os.environ.get(self.credentialsEnvVar)
            if key:
                headers["Authorization"] = "Bearer " + key
            else:
                log.warning("%s is not set, sending requests without credentials", self.credentialsEnvVar)
        return headers

    def complete(self, prompt):
        payload = {
            "model": self.modelName,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        delay = self.backoff
        lastError = None
        for attempt in range(1, self.attempts + 1):
            try:
                response = self.session.post(self.url, json=payload, headers=self.headers(), timeout=self.timeout)
                response.raise_for_status()
                return response.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as err:
                lastError = err
                log.warning("request %d/%d to %s failed: %s", attempt, self.attempts, self.url, err)
                if attempt < self.attempts:
                    time.sleep(delay)
                    delay *= 2
        raise EndpointUnreachable("%s unreachable after %d attempts: %s" % (self.url, self.attempts, lastError))

class ScriptedBackend(ModelBackend):
    name = "scripted"

    def __init__(self, responses, directory=None):
        """
        Replays canned completions in order, one per prompt. Prompts are kept for
        inspection.

        Args:
            responses (list): completion texts.
            directory (str, optional): where the responses were read from; per-target
                subdirectories of it take over in forTarget.
        """
        self.responses = list(responses)
        self.directory = directory
        self.cursor = 0
        self.prompts = []
        self.lock = threading.Lock()

    @classmethod
    def fromDirectory(cls, directory):
        """Reads 000.txt, 001.txt, ... in name order."""
        if not os.path.isdir(directory):
            raise CustomError("no script directory at %s" % directory)
        responses = []
        for path in sorted(glob.glob(os.path.join(directory, "*.txt"))):
            with open(path, "r", encoding="utf-8") as infile:
                responses.append(infile.read())
        log.info("loaded %d scripted responses from %s", len(responses), directory)
        return cls(responses, directory)

    def forTarget(self, target):
        if self.directory is None:
            return self
        perTarget = os.path.join(self.directory, target)
        if os.path.isdir(perTarget):
            return ScriptedBackend.fromDirectory(perTarget)
        return self

    def complete(self, prompt):
        with self.lock:
            if self.cursor >= len(self.responses):
                raise ScriptExhausted("script ran out after %d responses" % len(self.responses))
            text = self.responses[self.cursor]
            self.cursor += 1
            self.prompts.append(prompt)
        return text

@dataclass(frozen=True)
class BackendDescriptor:
    """
    How to reach the model: "scripted" with a script directory, or "http" with an
    endpoint. Credentials never live here, only the name of the variable holding them.
    """
    kind: str = "scripted"
    script_dir: str = None
    url: str = None
    model_name: str = None
    credentials_env_var: str = None
    temperature: float = DEFAULT_TEMPERATURE

    def build(self):
        if self.kind == "scripted":
            if not self.script_dir:
                raise CustomError("scripted backend needs a script directory")
            return ScriptedBackend.fromDirectory(self.script_dir)
        if self.kind == "http":
            if not self.url or not self.model_name:
                raise CustomError("http backend needs url and model_name")
            return HttpBackend(self.url, self.model_name, self.credentials_env_var, self.temperature)
        raise CustomError("unknown backend kind %s" % self.kind)

def complete(backend, prompt, instruction):
    """
    Sends a prompt and extracts what the instruction asks for.

    Args:
        backend (ModelBackend): the model.
        prompt (str): assembled prompt.
        instruction (Instruction): the prompt's instruction.

    Raises:
        EndpointUnreachable: the http backend gave up.
        ScriptExhausted: the scripted backend has no responses left.

    Returns:
        ModelResponse: the parsed response.
    """
    started = time.time()
    text = backend.complete(prompt)
    log.debug("%s backend answered in %.1fs", backend.name, time.time() - started)
    return parseResponse(text, instruction)
