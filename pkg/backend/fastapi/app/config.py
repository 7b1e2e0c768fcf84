from __future__ import annotations
import os
from functools import lru_cache
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

load_dotenv()

DEFAULT_CONFIG_PATH = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "..", "shared", "frft_config.yaml"))


def config_path() -> str:
    return os.getenv("FRFT_CONFIG_PATH", DEFAULT_CONFIG_PATH)


def api_key() -> Optional[str]:
    return os.getenv("FRFT_API_KEY") or None


class ToolkitSection(BaseModel):
    name: str = "frft2d"
    version: str = "1.0.0"


class SyntheticSection(BaseModel):
    size: int = Field(default=128, ge=2)
    seed: int = Field(default=20200917, ge=0)


class ShiftDemoSection(BaseModel):
    alpha_deg: float = 36.0
    beta_deg: float = 36.0
    deltas: List[float] = Field(default_factory=lambda: [0.2, 10.2])
    epsilon: float = 0.0


class AttackDemoSection(BaseModel):
    alpha_deg: float = 9.0
    beta_deg: float = 9.0
    delta: float = 0.2
    epsilon: float = 0.0
    key_seed: int = Field(default=9, ge=0, lt=2 ** 64)
    wrong_seeds: List[int] = Field(default_factory=lambda: list(range(1, 11)))
    wrong_angle_deg: float = 36.0


class Thresholds(BaseModel):
    unitarity: float = 1e-9
    conjugate_pair: float = 1e-12
    inverse: float = 1e-10
    additivity: float = 1e-8
    special_dft: float = 1e-9
    special_exact: float = 1e-12
    parseval: float = 1e-9
    polar_round_trip: float = 1e-12
    composition: float = 1e-12
    modulus: float = 1e-12
    energy: float = 1e-9
    attack_invariance: float = 1e-10
    pgm_quantum: float = 0.5
    wrong_key_max_correlation: float = 0.5


class CalibrationSection(BaseModel):
    """Phase-pipeline correlations measured once on the synthetic image, by size."""
    alpha_deg: float = 36.0
    delta: float = 0.2
    phase_invariance: Dict[int, float] = Field(default_factory=lambda: {64: 0.6304, 128: 0.5706})
    tolerance: float = Field(default=0.005, ge=0.0)

    def phase_invariance_floor(self, size: int) -> float:
        return self.phase_invariance[size] - self.tolerance


class SweepSection(BaseModel):
    sizes: List[int] = Field(default_factory=lambda: [32, 64])
    angles_deg: List[float] = Field(default_factory=lambda: [20.0, 36.0, 70.0])
    deltas: List[float] = Field(default_factory=lambda: [0.1, 0.2, 0.37])
    seed: int = 7


class VerificationSection(BaseModel):
    seed: int = 1234
    unitarity_trials: int = 20
    unitarity_sizes: List[int] = Field(default_factory=lambda: [4, 64])
    additivity_trials: int = 10
    additivity_size: int = 32
    special_sizes: List[int] = Field(default_factory=lambda: [8, 16, 64])
    image_size: int = 64


class AppConfig(BaseModel):
    toolkit: ToolkitSection = Field(default_factory=ToolkitSection)
    synthetic: SyntheticSection = Field(default_factory=SyntheticSection)
    shift_demo: ShiftDemoSection = Field(default_factory=ShiftDemoSection)
    attack_demo: AttackDemoSection = Field(default_factory=AttackDemoSection)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    calibration: CalibrationSection = Field(default_factory=CalibrationSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    verification: VerificationSection = Field(default_factory=VerificationSection)


def _load_yaml(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_config(path: Optional[str] = None) -> AppConfig:
    path = path or config_path()
    try:
        raw = _load_yaml(path)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e
    try:
        return AppConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e


@lru_cache(maxsize=1)
def get_config() -> AppConfig:
    return load_config()
