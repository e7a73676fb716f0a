"""
Bootstrap script to ensure the runtime config directory is populated.
Copies factory defaults from defaults/ to the config directory if files are
missing, and repairs settings files that are corrupt or missing keys added
in later versions.
"""
import json
import os
import shutil
from pathlib import Path

# Project structure
PROJECT_ROOT = Path(__file__).parent
CONFIG_DIR = Path(os.getenv("CONFIG_DIR", str(PROJECT_ROOT / "config")))
DEFAULTS_DIR = PROJECT_ROOT / "defaults"


def _load_json(path: Path) -> dict | None:
    """Return parsed JSON from path, or None if unreadable / invalid."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError, ValueError):
        return None
    return data if isinstance(data, dict) else None


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def merge_suite_settings(src: Path, dst: Path) -> list[str]:
    """
    Copy suite_settings.json when missing or invalid, otherwise backfill keys
    present in the default but absent from the live file. Existing values are
    never overwritten. Returns the backfilled keys.
    """
    current = _load_json(dst) if dst.exists() else None
    if current is None:
        print(f"[Bootstrap] Restoring {dst.name}")
        shutil.copy2(src, dst)
        return []
    default = _load_json(src) or {}
    missing = {k: v for k, v in default.items() if not k.startswith("_") and k not in current}
    if missing:
        print(f"[Bootstrap] Backfilling {len(missing)} setting(s) into {dst.name}: {sorted(missing)}")
        current.update(missing)
        _write_json(dst, current)
    return sorted(missing)


def ensure_config_files(config_dir: Path = CONFIG_DIR, defaults_dir: Path = DEFAULTS_DIR) -> None:
    """Verify and restore missing or corrupt config files from the defaults folder."""
    config_dir.mkdir(parents=True, exist_ok=True)

    if not defaults_dir.exists():
        print(f"[Bootstrap] Warning: Defaults directory not found at {defaults_dir}")
        return

    # 1. suite_settings.json: restore when missing or invalid, then backfill new keys
    src = defaults_dir / "suite_settings.json"
    if src.exists():
        merge_suite_settings(src, config_dir / "suite_settings.json")

    # 2. Spec files: copy any that are missing, never overwrite edited ones
    specs_dst = config_dir / "specs"
    specs_dst.mkdir(exist_ok=True)
    for spec in sorted((defaults_dir / "specs").glob("*.cfg")):
        target = specs_dst / spec.name
        if not target.exists():
            print(f"[Bootstrap] Restoring missing spec: {spec.name}")
            shutil.copy2(spec, target)


if __name__ == "__main__":
    ensure_config_files()
