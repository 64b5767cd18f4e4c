"""Generic JSON-over-HTTP adapter so any hosted model can serve a backend kind.

The wire shape is deliberately minimal — request ``{task_tag, prompt,
schema}``, response ``{payload}`` — so vendor specifics live in a thin
proxy, not in the engine. Transport failures surface as
``BackendUnavailable``; the gateway owns retries and caching.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request

from .errors import BackendUnavailable
from .gateway import BackendKind

DEFAULT_ROUTES = {kind: f"/v1/{kind.value.lower()}" for kind in BackendKind}


class RemoteBackend:
    def __init__(
        self,
        base_url: str,
        routes: dict[BackendKind, str] | None = None,
        auth_header: str | None = None,
        auth_token: str | None = None,
        timeout_s: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.routes = {**DEFAULT_ROUTES, **(routes or {})}
        self.auth_header = auth_header
        self.auth_token = auth_token
        self.timeout_s = timeout_s
        self.name = f"remote:{self.base_url}"

    def run(self, kind: BackendKind, request: dict) -> dict:
        body = {
            "task_tag": request.get("task_tag", kind.value.lower()),
            "prompt": request,
            "schema": request.get("schema_id"),
        }
        data = json.dumps(body, ensure_ascii=False).encode("utf-8")
        req = urllib.request.Request(
            self.base_url + self.routes[kind],
            data=data,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        if self.auth_header and self.auth_token:
            req.add_header(self.auth_header, self.auth_token)
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
                raw = resp.read()
        except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
            raise BackendUnavailable(f"{kind.value} endpoint unreachable: {exc}") from exc
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise BackendUnavailable(f"{kind.value} endpoint returned non-JSON body") from exc
        if not isinstance(doc, dict) or "payload" not in doc:
            raise BackendUnavailable(f"{kind.value} endpoint response missing 'payload'")
        return doc["payload"]
