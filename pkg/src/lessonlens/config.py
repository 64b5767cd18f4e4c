"""Engine configuration: file values, environment overrides, CLI flags.

Precedence is flags > environment (``LESSONLENS_*``) > config file >
defaults. The mock backend is the default so every command is hermetic
unless remote is opted into explicitly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import RangeError
from .gateway import ModelGateway, ResponseCache
from .mock_backend import MockBackend, merge_rules
from .remote_backend import RemoteBackend
from .resources import default_mock_rules, load_json_file
from .store import LessonStore

ENV_PREFIX = "LESSONLENS_"


@dataclass
class EngineConfig:
    store_dir: str = "store"
    backend: str = "mock"
    remote_base_url: str | None = None
    remote_auth_header: str | None = None
    remote_auth_token: str | None = None
    remote_timeout_s: float = 30.0
    mock_fixtures: str | None = None
    mock_latency_ms: int = 0
    cache_dir: str | None = None
    parallelism: int = 4
    window_s: float = 120.0
    min_tail_s: float = 30.0
    host: str = "127.0.0.1"
    port: int = 8765
    cors_origin: str = "*"
    api_token: str | None = None
    log_level: str = "INFO"

    def __post_init__(self) -> None:
        if self.backend not in ("mock", "remote"):
            raise RangeError(f"backend must be 'mock' or 'remote', got {self.backend!r}")
        if self.backend == "remote" and not self.remote_base_url:
            raise RangeError("backend 'remote' requires remote_base_url")

    # -- construction -----------------------------------------------------

    @classmethod
    def load(cls, config_path: str | Path | None = None, overrides: dict | None = None) -> "EngineConfig":
        values: dict = {}
        if config_path is not None:
            doc = load_json_file(config_path)
            if not isinstance(doc, dict):
                raise RangeError(f"config file {config_path} must hold a JSON object")
            values.update(doc)
        for f in fields(cls):
            env_key = ENV_PREFIX + f.name.upper()
            if env_key in os.environ:
                raw = os.environ[env_key]
                values[f.name] = _coerce(raw, f.type)
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise RangeError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)

    # -- factories --------------------------------------------------------

    def build_store(self) -> LessonStore:
        return LessonStore(self.store_dir)

    def build_gateway(self) -> ModelGateway:
        # scope the cache per backend mode so switching mock <-> remote can
        # never serve stale payloads from the other backend
        cache_dir = self.cache_dir or str(Path(self.store_dir) / "_cache" / self.backend)
        if self.backend == "mock":
            rules = default_mock_rules()
            if self.mock_fixtures:
                rules = merge_rules(rules, load_json_file(self.mock_fixtures))
            backend = MockBackend(rules, latency_s=self.mock_latency_ms / 1000.0)
        else:
            backend = RemoteBackend(
                base_url=self.remote_base_url,
                auth_header=self.remote_auth_header,
                auth_token=self.remote_auth_token,
                timeout_s=self.remote_timeout_s,
            )
        # A merged tail can stretch the last window to window_s + min_tail_s.
        return ModelGateway(
            backend,
            cache=ResponseCache(cache_dir),
            max_in_flight=self.parallelism,
            max_caption_window_ms=round((self.window_s + self.min_tail_s) * 1000),
        )


def _coerce(raw: str, annotation: object) -> object:
    text = str(annotation)
    if "int" in text:
        return int(raw)
    if "float" in text:
        return float(raw)
    return raw
