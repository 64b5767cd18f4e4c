"""Configuration precedence, validation, and gateway wiring."""

from __future__ import annotations

import json

import pytest

from lessonlens.config import EngineConfig
from lessonlens.errors import RangeError
from lessonlens.mock_backend import MockBackend
from lessonlens.remote_backend import RemoteBackend


class TestEngineConfig:
    def test_defaults_are_hermetic(self):
        config = EngineConfig()
        assert config.backend == "mock"
        gateway = config.build_gateway()
        assert isinstance(gateway.backend, MockBackend)

    def test_remote_requires_base_url(self):
        with pytest.raises(RangeError, match="remote_base_url"):
            EngineConfig(backend="remote")

    def test_unknown_backend_rejected(self):
        with pytest.raises(RangeError):
            EngineConfig(backend="quantum")

    def test_file_then_env_then_flags(self, tmp_path, monkeypatch):
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps({"store_dir": "from-file", "parallelism": 2}), "utf-8"
        )
        monkeypatch.setenv("LESSONLENS_PARALLELISM", "6")
        config = EngineConfig.load(config_path, overrides={"store_dir": "from-flag"})
        assert config.store_dir == "from-flag"
        assert config.parallelism == 6

    def test_unknown_keys_rejected(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"storedir": "typo"}), "utf-8")
        with pytest.raises(RangeError, match="unknown config keys"):
            EngineConfig.load(config_path)

    def test_remote_gateway_wiring(self, tmp_path):
        config = EngineConfig(
            store_dir=str(tmp_path),
            backend="remote",
            remote_base_url="http://models.internal:9000",
            remote_auth_header="X-Token",
            remote_auth_token="secret",
        )
        gateway = config.build_gateway()
        assert isinstance(gateway.backend, RemoteBackend)
        assert gateway.backend.base_url == "http://models.internal:9000"

    def test_cache_dir_scoped_per_backend(self, tmp_path):
        mock_config = EngineConfig(store_dir=str(tmp_path))
        remote_config = EngineConfig(
            store_dir=str(tmp_path), backend="remote", remote_base_url="http://x"
        )
        mock_cache = mock_config.build_gateway().cache.directory
        remote_cache = remote_config.build_gateway().cache.directory
        assert mock_cache != remote_cache
        assert mock_cache.name == "mock" and remote_cache.name == "remote"

    def test_mock_fixture_rules_merge(self, tmp_path):
        fixtures = tmp_path / "fixtures.json"
        fixtures.write_text(
            json.dumps({"caption_tables": {"L9": {"0-1000": "from fixture"}}}), "utf-8"
        )
        config = EngineConfig(store_dir=str(tmp_path), mock_fixtures=str(fixtures))
        gateway = config.build_gateway()
        assert gateway.backend.rules["caption_tables"]["L9"]["0-1000"] == "from fixture"
        # defaults are still present after the merge
        assert gateway.backend.rules["hotspot_rules"]
