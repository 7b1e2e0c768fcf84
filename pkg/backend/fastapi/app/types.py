from __future__ import annotations
import math
from typing import Any, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

Pair = Tuple[float, float]


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


# -------- shift theorem reports --------

class ShiftSettings(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    image_id: str
    alpha_deg: float
    beta_deg: float
    delta: float = 0.0
    epsilon: float = 0.0
    rho: int = 0
    lambda_: int = Field(default=0, alias="lambda")


class PredictedShifts(BaseModel):
    """Continuous-domain displacements predicted by the shift theorems."""
    model_config = ConfigDict(frozen=True)

    amplitude_uv: Pair   # spectral amplitude displacement under a frequency shift
    spatial_uv: Pair     # spectral amplitude displacement under a spatial shift
    space_xy: Pair       # amplitude-only reconstruction displacement under a frequency shift
    amplitude_uv_px: Optional[Pair] = None
    spatial_uv_px: Optional[Pair] = None
    space_xy_px: Optional[Pair] = None


class ShiftTheoremReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    pipeline: Literal["phase", "amplitude", "spatial"]
    correlation: float = Field(ge=-1.0, le=1.0)
    relative_l2_error: float = Field(ge=0.0)
    predicted_shift_uv: Pair = (0.0, 0.0)
    predicted_shift_px: Pair = (0.0, 0.0)
    alignment_px: Optional[Tuple[int, int]] = None
    settings: ShiftSettings
    label: str = ""  # shift as requested, before mod-1 reduction

    @field_validator("correlation", "relative_l2_error")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    def to_csv_row(self) -> List[str]:
        s = self.settings
        align = self.alignment_px or ("", "")
        return [_fmt(v) for v in (
            s.image_id, self.pipeline, s.alpha_deg, s.beta_deg, s.delta, s.epsilon, s.rho, s.lambda_,
            self.correlation, self.relative_l2_error,
            self.predicted_shift_uv[0], self.predicted_shift_uv[1],
            self.predicted_shift_px[0], self.predicted_shift_px[1],
            align[0], align[1],
            self.label,
        )]


REPORT_COLUMNS = [
    "image_id", "pipeline", "alpha_deg", "beta_deg", "delta", "epsilon", "rho", "lambda",
    "correlation", "relative_l2_error",
    "predicted_u", "predicted_v", "predicted_u_px", "predicted_v_px",
    "aligned_u_px", "aligned_v_px",
    "label",
]


# -------- encryption --------

class QualityMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    correlation: float
    relative_l2: float
    psnr: float  # math.inf for identical arrays


class StageMetrics(BaseModel):
    stage: str
    correlation: float
    relative_l2: float
    psnr: float

    def to_csv_row(self) -> List[str]:
        return [self.stage, _fmt(self.correlation), _fmt(self.relative_l2), _fmt(self.psnr)]


METRIC_COLUMNS = ["stage", "correlation", "relative_l2", "psnr"]


class AttackMetrics(BaseModel):
    alpha_deg: float
    beta_deg: float
    delta: float
    epsilon: float
    key_fingerprint: str
    stages: List[StageMetrics] = Field(default_factory=list)

    def stage(self, name: str) -> StageMetrics:
        return next(s for s in self.stages if s.stage == name)


# -------- verification --------

class PropertyResult(BaseModel):
    name: str
    module: str
    measured: float
    threshold: float
    comparison: Literal["<", "<=", ">=", ">", "=="]
    passed: bool
    detail: str = ""

    def to_csv_row(self) -> List[str]:
        return [self.module, self.name, _fmt(self.measured), self.comparison, _fmt(self.threshold),
                "pass" if self.passed else "FAIL", self.detail]


PROPERTY_COLUMNS = ["module", "property", "measured", "comparison", "threshold", "status", "detail"]


class VerificationReport(BaseModel):
    results: List[PropertyResult] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.passed]


# -------- service payloads --------

class ShiftTheoremIn(BaseModel):
    size: int = Field(default=64, ge=4, le=512)
    seed: Optional[int] = Field(default=None, ge=0)
    alpha_deg: float = 36.0
    beta_deg: float = 36.0
    delta: float = 0.2
    epsilon: float = 0.0


class AttackIn(BaseModel):
    size: int = Field(default=64, ge=4, le=512)
    seed: Optional[int] = Field(default=None, ge=0)
    key_seed: int = Field(default=9, ge=0, lt=2 ** 64)
    alpha_deg: float = 9.0
    beta_deg: float = 9.0
    delta: float = 0.2
    epsilon: float = 0.0


class VerifyIn(BaseModel):
    inject_fault: float = 0.0


# -------- command line --------

Command = Literal["transform", "shift-demo", "encrypt", "decrypt", "attack-demo", "verify"]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    command: Command
    input_path: Optional[str] = None
    out_dir: str = "."
    report_path: Optional[str] = None
    key_path: Optional[str] = None
    reference_path: Optional[str] = None
    alpha_deg: float
    beta_deg: float
    delta: Optional[float] = None
    epsilon: float = 0.0
    rho: int = 0
    lambda_: int = Field(default=0, alias="lambda")
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    size: Optional[int] = Field(default=None, ge=2, le=4096)
    inverse: bool = False
    png: bool = False
    inject_fault: float = 0.0

    @field_validator("alpha_deg", "beta_deg", "epsilon", "inject_fault")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @field_validator("delta")
    @classmethod
    def _finite_delta(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @field_validator("out_dir", "input_path", "report_path", "key_path", "reference_path")
    @classmethod
    def _non_empty(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not v.strip():
            raise ValueError("path must not be empty")
        return v

    @model_validator(mode="after")
    def _paths_required(self) -> "RunConfig":
        if self.command in ("transform", "encrypt", "decrypt") and not self.input_path:
            raise ValueError(f"{self.command} requires --in")
        return self
