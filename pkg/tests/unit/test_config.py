"""
Unit tests for configuration loading and the bootstrap of the config directory.
"""
import json
from pathlib import Path

import pytest

from bootstrap import ensure_config_files, merge_suite_settings
from config import Config


@pytest.fixture
def empty_config_dir(temp_dir, monkeypatch):
    """Point CONFIG_DIR at an empty directory so no settings file is overlaid."""
    config_dir = temp_dir / "config"
    config_dir.mkdir()
    monkeypatch.setenv("CONFIG_DIR", str(config_dir))
    return config_dir


@pytest.mark.unit
class TestConfig:
    """Tests for Config defaults, environment variables and the JSON overlay."""

    def test_environment_overrides(self, empty_config_dir, monkeypatch):
        monkeypatch.setenv("PWLAB_SAMPLES", "7")
        monkeypatch.setenv("PWLAB_RHO_RANGE", "1.0, 2.5")
        monkeypatch.setenv("PWLAB_THREADS", "0")
        config = Config()
        assert config.samples == 7
        assert config.rho_range == (1.0, 2.5)
        assert config.threads == 1

    def test_settings_file_overlay(self, empty_config_dir):
        """Test suite_settings.json values win over the defaults."""
        (empty_config_dir / "suite_settings.json").write_text(json.dumps({
            "_comment": "ignored",
            "samples": "3",
            "tol": 1e-8,
            "rho_range": [1, 2],
            "pretty_json": False,
            "unknown_key": 5,
        }))
        config = Config()
        assert config.samples == 3
        assert config.tol == 1e-8
        assert config.rho_range == (1.0, 2.0)
        assert config.pretty_json is False
        assert not hasattr(config, "unknown_key")

    def test_corrupt_settings_file_is_ignored(self, empty_config_dir):
        (empty_config_dir / "suite_settings.json").write_text("{ not json")
        config = Config()
        assert config.identity_tol == 1e-9

    def test_apply(self, empty_config_dir, temp_dir):
        """Test command-line overrides skip None and convert paths."""
        config = Config().apply(samples=5, seed=None, output_dir=str(temp_dir / "out"))
        assert config.samples == 5
        assert config.seed == Config().seed
        assert config.output_dir == temp_dir / "out"
        with pytest.raises(AttributeError):
            config.apply(not_a_setting=1)

    def test_ensure_output_dir(self, empty_config_dir, temp_dir):
        config = Config().apply(output_dir=temp_dir / "nested" / "out")
        config.ensure_output_dir()
        assert config.output_dir.is_dir()


@pytest.mark.unit
class TestBootstrap:
    """Tests for restoring and backfilling the config directory."""

    def test_missing_settings_are_copied(self, temp_dir):
        src = temp_dir / "default.json"
        src.write_text(json.dumps({"samples": 100, "tol": 1e-10}))
        dst = temp_dir / "live.json"
        assert merge_suite_settings(src, dst) == []
        assert json.loads(dst.read_text()) == {"samples": 100, "tol": 1e-10}

    def test_new_keys_are_backfilled(self, temp_dir):
        """Test existing values survive and only absent keys are added."""
        src = temp_dir / "default.json"
        src.write_text(json.dumps({"_comment": "x", "samples": 100, "killing_tol": 1e-8}))
        dst = temp_dir / "live.json"
        dst.write_text(json.dumps({"samples": 12}))
        assert merge_suite_settings(src, dst) == ["killing_tol"]
        assert json.loads(dst.read_text()) == {"samples": 12, "killing_tol": 1e-8}

    def test_corrupt_settings_are_restored(self, temp_dir):
        src = temp_dir / "default.json"
        src.write_text(json.dumps({"samples": 100}))
        dst = temp_dir / "live.json"
        dst.write_text("[1, 2")
        merge_suite_settings(src, dst)
        assert json.loads(dst.read_text()) == {"samples": 100}

    def test_ensure_config_files_copies_specs(self, temp_dir):
        defaults = Path(__file__).resolve().parents[2] / "defaults"
        target = temp_dir / "config"
        ensure_config_files(target, defaults)
        assert (target / "suite_settings.json").exists()
        assert (target / "specs" / "singular_n0.cfg").exists()
