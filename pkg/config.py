"""
Central configuration for the verification suites.

All sample counts, tolerances and paths are defined here.
Override via environment variables or by passing a Config instance directly.

Settings priority (highest wins):
  1. Command-line flags (applied by main.py on top of the Config)
  2. config/suite_settings.json  (admin-editable, persisted)
  3. Environment variables and the hardcoded defaults in this file
"""
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

# Project root (directory containing this file)
PROJECT_ROOT = Path(__file__).parent

TOOL_VERSION = "0.3.0"

DEFAULT_SPECS_DIR  = PROJECT_ROOT / "defaults" / "specs"
DEFAULT_SPEC_PATH  = DEFAULT_SPECS_DIR / "singular_n0.cfg"
DEFAULT_OUTPUT_DIR = PROJECT_ROOT / "output"


def _rho_range_from_env() -> tuple[float, float]:
    raw = os.getenv("PWLAB_RHO_RANGE", "0.5,3.0")
    lo, hi = (float(x) for x in raw.split(","))
    return lo, hi


@dataclass
class Config:
    # --- Sampling ---
    samples: int = field(default_factory=lambda: int(os.getenv("PWLAB_SAMPLES", "100")))
    seed:    int = field(default_factory=lambda: int(os.getenv("PWLAB_SEED", "20130101")))
    rho_range: tuple[float, float] = field(default_factory=_rho_range_from_env)
    # Sample points for the complex family have rho uniform in rho_range and
    # every other coordinate uniform in [-1, 1].

    # --- Tolerances ---
    tol:          float = field(default_factory=lambda: float(os.getenv("PWLAB_TOL", "1e-10")))
    identity_tol: float = 1e-9      # tensor identities at random points
    strict_tol:   float = 1e-12     # values known in closed form
    rank_tol:     float = 1e-9      # singular values relative to the largest
    rho_min:      float = 1e-6      # singular-set guard for geodesics
    frame_curvature_tol: float = 1e-6
    killing_tol:  float = 1e-8

    # --- Geodesics ---
    geodesic_t_end: float = 2.0
    smoke_t_end:    float = 100.0

    # --- Concurrency ---
    threads: int = field(default_factory=lambda: max(1, int(os.getenv("PWLAB_THREADS", "4"))))

    # --- Paths ---
    spec_path: Path = field(
        default_factory=lambda: Path(os.getenv("PWLAB_SPEC", str(DEFAULT_SPEC_PATH)))
    )
    output_dir: Path = field(
        default_factory=lambda: Path(os.getenv("PWLAB_OUT", str(DEFAULT_OUTPUT_DIR)))
    )
    pretty_json: bool = True        # Indent JSON output for human readability

    def __post_init__(self) -> None:
        """Overlay runtime-tunable settings from suite_settings.json if present."""
        config_dir = Path(os.getenv("CONFIG_DIR", str(PROJECT_ROOT / "config")))
        settings_file = config_dir / "suite_settings.json"
        if not settings_file.exists():
            return
        _type_map: dict[str, type] = {
            "samples":             int,
            "seed":                int,
            "tol":                 float,
            "identity_tol":        float,
            "strict_tol":          float,
            "rank_tol":            float,
            "rho_min":             float,
            "frame_curvature_tol": float,
            "killing_tol":         float,
            "geodesic_t_end":      float,
            "smoke_t_end":         float,
            "threads":             int,
            "pretty_json":         bool,
        }
        try:
            with open(settings_file, encoding="utf-8") as f:
                overrides = {k: v for k, v in json.load(f).items() if not k.startswith("_")}
            for key, val in overrides.items():
                if key in _type_map and hasattr(self, key):
                    setattr(self, key, _type_map[key](val))
            if "rho_range" in overrides:
                lo, hi = overrides["rho_range"]
                self.rho_range = (float(lo), float(hi))
        except Exception as exc:
            logger.warning("Failed to load suite_settings.json: %s", exc)

    def apply(self, **overrides: Optional[object]) -> "Config":
        """Set every override that is not None; returns self for chaining."""
        for key, val in overrides.items():
            if val is None:
                continue
            if not hasattr(self, key):
                raise AttributeError(f"unknown setting {key!r}")
            setattr(self, key, Path(val) if key in ("spec_path", "output_dir") else val)
        return self

    def ensure_output_dir(self) -> None:
        self.output_dir.mkdir(parents=True, exist_ok=True)
