"""
Configuration loading.

Reads ``config.yaml`` (or any YAML file with the same sections) into frozen
dataclasses. Missing sections and keys fall back to the defaults below.
"""

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG = BASE_DIR / "config.yaml"


@dataclass(frozen=True)
class NumericSettings:
    unit_tolerance: float = 1e-12
    rotation_tolerance: float = 1e-9
    small_angle: float = 1e-8
    antipode_margin: float = 1e-9
    ambiguity_margin: float = 1e-9
    coplanar_tolerance: float = 1e-9
    purity_tolerance: float = 1e-9
    input_normalize_tolerance: float = 1e-6
    max_sider_order: int = 8


@dataclass(frozen=True)
class HarnessSettings:
    sigma: float = 0.1
    inv_dt_min: int = 16
    inv_dt_max: int = 2048
    smooth_inv_dt_max: int = 4096
    samples_per_interval: int = 64
    seno_k: int = 3
    reps: int = 3
    methods: Tuple[str, ...] = ("slerp", "squad", "seno2", "seno3")
    float_digits: int = 17
    workers: int = 1


@dataclass(frozen=True)
class DerivativeSettings:
    fd_step: float = 1e-5
    jump_steps: Dict[int, float] = field(default_factory=lambda: {1: 1e-5, 2: 1e-5, 3: 1e-3})
    richardson: bool = True
    degenerate_sin: float = 1e-6


@dataclass(frozen=True)
class Settings:
    numerics: NumericSettings = field(default_factory=NumericSettings)
    harness: HarnessSettings = field(default_factory=HarnessSettings)
    derivatives: DerivativeSettings = field(default_factory=DerivativeSettings)
    modules: Dict[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None


def _section(cls, raw: Optional[dict]):
    """Build a settings dataclass from a YAML mapping, ignoring unknown keys."""
    if not raw:
        return cls()
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        logger.warning(f"Ignoring unknown {cls.__name__} keys: {unknown}")
    values = {k: v for k, v in raw.items() if k in known}
    if "methods" in values:
        values["methods"] = tuple(values["methods"])
    if "jump_steps" in values:
        values["jump_steps"] = {int(k): float(v) for k, v in values["jump_steps"].items()}
    return cls(**values)


def load_settings(path: Optional[Path] = None) -> Settings:
    """Load settings from YAML; a missing file yields pure defaults."""
    config_path = Path(path) if path is not None else DEFAULT_CONFIG
    if not config_path.exists():
        logger.info(f"No configuration at {config_path}, using defaults")
        return Settings()

    with open(config_path, "r") as f:
        raw = yaml.safe_load(f) or {}

    return Settings(
        numerics=_section(NumericSettings, raw.get("numerics")),
        harness=_section(HarnessSettings, raw.get("harness")),
        derivatives=_section(DerivativeSettings, raw.get("derivatives")),
        modules=raw.get("modules") or {},
        source=config_path,
    )


def with_overrides(settings: Settings, **harness_overrides) -> Settings:
    """Return a copy with CLI-provided harness values applied (None means keep)."""
    changes = {k: v for k, v in harness_overrides.items() if v is not None}
    if "methods" in changes:
        changes["methods"] = tuple(changes["methods"])
    return replace(settings, harness=replace(settings.harness, **changes))


NUMERICS = NumericSettings()
