"""Request and response models shared by the HTTP service and the CLI.

Every runner entry point takes one request model and returns one report
model, so the CLI and the FastAPI layer serialize exactly the same shapes.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

ProblemId = Literal["poisson1d", "poisson2d", "fip"]
FdmMethodName = Literal["thomas", "gauss_seidel", "sor", "direct", "jacobi"]
FipModeName = Literal["recover-source", "recover-coefficient"]
SuiteName = Literal["paper-forward", "paper-fip", "convergence"]


def _parse_int_list(value):
    # configparser hands us "1,20,20,20,1"; JSON clients send a real list
    if isinstance(value, str):
        parts = [p.strip() for p in value.replace(" ", ",").split(",") if p.strip()]
        return [int(p) for p in parts]
    return value


class ProblemSettings(BaseModel):
    """Which built-in problem to run and its free parameters."""

    model_config = ConfigDict(extra="forbid")

    id: ProblemId = "poisson1d"
    source_mode: Literal["manufactured", "paper_verbatim"] = "manufactured"
    b1: float = 1.0
    w1: float = math.pi
    length: float = 1.0

    @field_validator("length")
    @classmethod
    def _positive_length(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("length must be positive")
        return v


class FdmSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    resolution: int = Field(default=512, ge=2)
    method: Optional[FdmMethodName] = None  # None = per-problem default
    tol: float = Field(default=1e-10, gt=0.0)
    max_iter: int = Field(default=200_000, ge=1)
    omega: Optional[float] = None

    @field_validator("omega")
    @classmethod
    def _omega_range(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not (0.0 < v < 2.0):
            raise ValueError("omega must lie in (0, 2)")
        return v


class TrainSettings(BaseModel):
    """Training knobs; None means "use the per-problem default"."""

    model_config = ConfigDict(extra="forbid")

    arch: Optional[list[int]] = None
    h_arch: Optional[list[int]] = None
    n_collocation: Optional[int] = Field(default=None, ge=1)
    n_boundary_per_edge: int = Field(default=64, ge=1)
    resample_each_epoch: bool = False
    adam_epochs: Optional[int] = Field(default=None, ge=0)
    adam_lr: float = Field(default=1e-3, gt=0.0)
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = Field(default=1e-8, gt=0.0)
    lbfgs_max_iters: Optional[int] = Field(default=None, ge=0)
    lbfgs_memory: int = Field(default=10, ge=1)
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    w_pde: float = Field(default=1.0, ge=0.0)
    w_bc: float = Field(default=1.0, ge=0.0)
    w_data: float = Field(default=1.0, ge=0.0)
    seed: int = 0

    _coerce_arch = field_validator("arch", "h_arch", mode="before")(_parse_int_list)


class SolveFdmRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemSettings = ProblemSettings()
    fdm: FdmSettings = FdmSettings()
    seed: int = 0
    outdir: str = "runs"
    experiment_id: Optional[str] = None


class TrainPinnRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemSettings = ProblemSettings()
    train: TrainSettings = TrainSettings()
    outdir: str = "runs"
    experiment_id: Optional[str] = None


class FipRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemSettings = ProblemSettings(id="fip")
    mode: FipModeName = "recover-source"
    n_obs: int = Field(default=20, ge=2)
    obs_resolution: int = Field(default=1024, ge=2)
    train: TrainSettings = TrainSettings()
    outdir: str = "runs"
    experiment_id: Optional[str] = None


class BenchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    suite: SuiteName = "paper-forward"
    seed: int = 0
    outdir: str = "runs"


class ErrorSummaryModel(BaseModel):
    l2_relative: float
    l_inf: float
    n_points: int


class LossReportModel(BaseModel):
    l_pde: float
    l_bc: float
    l_data: float
    total: float


class RunReport(BaseModel):
    """Everything a caller needs to judge one run, plus artifact paths."""

    experiment_id: str
    method: Literal["fdm", "pinn"]
    problem_id: str
    config: dict[str, dict[str, str]]
    error: Optional[ErrorSummaryModel] = None
    error_hidden: Optional[ErrorSummaryModel] = None
    final_loss: Optional[LossReportModel] = None
    iterations: int
    wall_time: float
    seed: int
    converged: bool
    ok: bool
    artifacts: dict[str, str]


class BenchRow(BaseModel):
    row_id: str
    problem_id: str
    method: Literal["fdm", "pinn"]
    l2_relative: Optional[float] = None
    order: Optional[float] = None
    final_loss: Optional[float] = None
    ok: bool
    experiment_id: str


class BenchReport(BaseModel):
    suite: SuiteName
    rows: list[BenchRow]
    ok: bool
    wall_time: float
    artifacts: dict[str, str]
