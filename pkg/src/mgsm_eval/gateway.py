"""Uniform model access with caching, retry, and offline replay.

Three backends share one interface:

* ``http_provider`` -- JSON chat-completion calls against a configured
  endpoint, with exponential-backoff retry and token-bucket rate limiting.
* ``replay`` -- answers from a recorded transcript archive; a cache miss is
  an error, never a silent fallback, so replayed runs are deterministic.
* ``scripted_mock`` -- canned responses for tests.

Transcripts are keyed by a hash of (model name, prompt, generation params),
so request issue order never affects which response a prompt gets.
"""

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field

HTTP_PROVIDER = "http_provider"
REPLAY = "replay"
SCRIPTED_MOCK = "scripted_mock"

ERROR_RESPONSE_FLAG = "__error__"


class TransportError(RuntimeError):
    """All retries against a live backend failed."""


class ReplayMissError(KeyError):
    """A replayed run asked for a transcript that was never recorded."""


class MockExhaustedError(RuntimeError):
    """A scripted mock ran out of programmed responses."""


@dataclass(frozen=True)
class ModelSpec:
    name: str
    backend: str = REPLAY
    endpoint: str = ""
    temperature: float = 0.0
    max_output_tokens: int = 4096
    script: tuple = ()  # scripted_mock only
    responder: object = None  # scripted_mock only: callable(prompt) -> str

    def __post_init__(self):
        if self.backend not in (HTTP_PROVIDER, REPLAY, SCRIPTED_MOCK):
            raise ValueError(f"unknown backend: {self.backend!r}")
        if self.backend == HTTP_PROVIDER and not self.endpoint:
            raise ValueError(f"model {self.name!r}: http_provider requires an endpoint")

    def cache_key(self, prompt: str) -> str:
        payload = json.dumps(
            [self.name, prompt, self.temperature, self.max_output_tokens],
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class Transcript:
    model: str
    prompt: str
    response: str
    cache_key: str
    dataset_version: str = ""
    qid: int = 0
    lang: str = ""
    temperature: float = 0.0
    max_output_tokens: int = 4096
    error: bool = False

    def to_json(self) -> str:
        return json.dumps(self.__dict__, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "Transcript":
        return cls(**json.loads(line))


def save_archive(transcripts, path) -> None:
    """Line-delimited transcript archive, deduplicated by cache key."""
    seen = set()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in transcripts:
            if t.cache_key in seen:
                continue
            seen.add(t.cache_key)
            fh.write(t.to_json() + "\n")


def load_archive(path) -> dict:
    """Archive file -> {cache_key: Transcript}."""
    archive = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            t = Transcript.from_json(line)
            archive.setdefault(t.cache_key, t)
    return archive


class _TokenBucket:
    def __init__(self, rate_per_sec: float, burst: int):
        self.rate = rate_per_sec
        self.capacity = burst
        self.tokens = float(burst)
        self.updated = time.monotonic()
        self.lock = threading.Lock()

    def take(self) -> None:
        while True:
            with self.lock:
                now = time.monotonic()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            time.sleep(wait)


@dataclass
class Gateway:
    """Dispatches completions and caches every response before returning.

    Safe for concurrent use: the cache has a single lock, scripted mocks pop
    under that lock, and live backends go through per-backend semaphores.
    """

    archive: dict = field(default_factory=dict)  # cache_key -> Transcript
    max_attempts: int = 3
    backoff_base: float = 0.5
    max_concurrent: int = 4
    requests_per_second: float = 8.0

    def __post_init__(self):
        self._lock = threading.Lock()
        self._scripts = {}
        self._semaphores = {}
        self._buckets = {}

    @classmethod
    def from_archive_file(cls, path, **kwargs) -> "Gateway":
        return cls(archive=load_archive(path), **kwargs)

    def complete(self, spec: ModelSpec, prompt: str) -> str:
        key = spec.cache_key(prompt)
        with self._lock:
            cached = self.archive.get(key)
        if cached is not None and not cached.error:
            return cached.response

        if spec.backend == REPLAY:
            if cached is not None and cached.error:
                raise TransportError(f"{spec.name}: recorded run failed for key {key}")
            raise ReplayMissError(key)
        if spec.backend == SCRIPTED_MOCK:
            response = self._scripted_response(spec, prompt)
        else:
            response = self._http_complete(spec, prompt)

        transcript = Transcript(
            model=spec.name,
            prompt=prompt,
            response=response,
            cache_key=key,
            temperature=spec.temperature,
            max_output_tokens=spec.max_output_tokens,
        )
        with self._lock:
            self.archive[key] = transcript
        return response

    def _scripted_response(self, spec: ModelSpec, prompt: str) -> str:
        if spec.responder is not None:
            return spec.responder(prompt)
        with self._lock:
            remaining = self._scripts.setdefault(spec.name, list(spec.script))
            if not remaining:
                raise MockExhaustedError(f"mock {spec.name!r} has no response left")
            return remaining.pop(0)

    def _http_complete(self, spec: ModelSpec, prompt: str) -> str:
        import httpx

        api_key = os.environ.get(self._credential_var(spec))
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": spec.name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": spec.temperature,
            "max_tokens": spec.max_output_tokens,
        }
        semaphore = self._backend_semaphore(spec.name)
        bucket = self._backend_bucket(spec.name)
        last_error = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            bucket.take()
            with semaphore:
                try:
                    resp = httpx.post(spec.endpoint, json=body, headers=headers, timeout=120)
                    if resp.status_code in (429, 500, 502, 503, 504):
                        last_error = f"HTTP {resp.status_code}"
                        continue
                    resp.raise_for_status()
                    data = resp.json()
                    return data["choices"][0]["message"]["content"]
                except (httpx.HTTPError, KeyError, ValueError) as exc:
                    last_error = str(exc)
        raise TransportError(f"{spec.name}: retries exhausted ({last_error})")

    @staticmethod
    def _credential_var(spec: ModelSpec) -> str:
        sanitized = "".join(c if c.isalnum() else "_" for c in spec.name.upper())
        return f"{sanitized}_API_KEY"

    def _backend_semaphore(self, name: str):
        with self._lock:
            if name not in self._semaphores:
                self._semaphores[name] = threading.Semaphore(self.max_concurrent)
            return self._semaphores[name]

    def _backend_bucket(self, name: str):
        with self._lock:
            if name not in self._buckets:
                self._buckets[name] = _TokenBucket(self.requests_per_second, self.max_concurrent)
            return self._buckets[name]


def record_run(gateway: Gateway, specs, prompts, path) -> list:
    """Run every (spec, prompt) pair and write a replayable archive.

    Failures are recorded as flagged placeholders; the archive is written
    either way so partial runs are not lost.
    """
    transcripts = []
    for spec in specs:
        for prompt in prompts:
            key = spec.cache_key(prompt)
            try:
                response = gateway.complete(spec, prompt)
                error = False
            except (TransportError, MockExhaustedError, ReplayMissError):
                response = ERROR_RESPONSE_FLAG
                error = True
            transcripts.append(
                Transcript(
                    model=spec.name,
                    prompt=prompt,
                    response=response,
                    cache_key=key,
                    temperature=spec.temperature,
                    max_output_tokens=spec.max_output_tokens,
                    error=error,
                )
            )
    save_archive(transcripts, path)
    return transcripts
