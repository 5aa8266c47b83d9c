"""
Run configuration
Environment defaults come from the process environment (and a .env file);
the run itself is one JSON document validated by the pydantic models below
before any compute starts.
"""

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, List, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

from .base import Params, DealiasRule, ContractError
from .spectral import Grid2D

# Load environment variables
load_dotenv()

DEFAULT_OUTPUT_DIR = "runs"

COMMANDS = ("solve", "evolve", "kernel", "classify", "sweep-dc", "stability")


@dataclass
class Settings:
    log_level: str
    output_dir: str
    jobs: int
    seed: int


def get_settings() -> Settings:
    try:
        jobs = int(os.getenv("BOZK_JOBS", "1"))
        seed = int(os.getenv("BOZK_SEED", "0"))
    except ValueError as e:
        raise ContractError(f"BOZK_JOBS and BOZK_SEED must be integers: {e}")
    return Settings(
        log_level=os.getenv("BOZK_LOG_LEVEL", "INFO").upper(),
        output_dir=os.getenv("BOZK_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
        jobs=max(1, jobs),
        seed=seed
    )


class GridConfig(BaseModel):
    nx: int = Field(256, ge=8, description="Points along x (even)")
    ny: int = Field(256, ge=8, description="Points along y (even)")
    lx: float = Field(..., gt=0, description="Half-width of the box in x")
    ly: float = Field(..., gt=0, description="Half-width of the box in y")

    @field_validator("nx", "ny")
    @classmethod
    def even_points(cls, v: int) -> int:
        if v % 2:
            raise ValueError("grid sizes must be even")
        return v

    def to_grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.lx, self.ly)


class ParamsConfig(BaseModel):
    p: float = Field(..., gt=0, description="Nonlinearity exponent")
    alpha: float = Field(..., description="Benjamin-Ono dispersion coefficient (nonzero)")
    epsilon: Literal[-1, 1] = Field(1, description="Transverse dispersion sign")
    c: float = Field(1.0, description="Wave speed (nonzero)")

    @field_validator("alpha", "c")
    @classmethod
    def nonzero(cls, v: float) -> float:
        if v == 0:
            raise ValueError("must be nonzero")
        return v

    def to_params(self) -> Params:
        return Params(p=self.p, alpha=self.alpha, epsilon=self.epsilon, c=self.c)


class SolverOptions(BaseModel):
    gamma: Optional[float] = Field(None, gt=0, description="Stabilizer exponent, default (p+1)/p")
    tol: float = Field(1e-10, gt=0, description="Sup-norm equation residual target")
    max_iter: int = Field(500, gt=0)
    amplitude: float = Field(1.0, gt=0, description="Amplitude of the Gaussian initial guess")
    initial_guess: Optional[str] = Field(None, description="Field file holding the initial guess")
    contamination_threshold: float = Field(1e-3, gt=0, description="Boundary contamination allowed in decay fits")
    tail_tol: float = Field(1e-5, gt=0, description="Largest spectral amplitude allowed near Nyquist, relative to the peak")


class EvolveOptions(BaseModel):
    dt: float = Field(..., gt=0)
    t_end: float = Field(..., gt=0)
    dealias: DealiasRule = Field(DealiasRule.TWO_THIRDS)
    direction: Literal[-1, 1] = Field(1)
    record_every: int = Field(10, ge=1)
    snapshot_every: Optional[int] = Field(None, ge=1, description="Write a field file every n steps")
    initial_field: Optional[str] = Field(None, description="Field file with u0; default is the solved wave")


class SweepOptions(BaseModel):
    c_values: List[float] = Field(..., min_length=2, description="Positive speeds sampled for d(c)")

    @field_validator("c_values")
    @classmethod
    def positive_speeds(cls, v: List[float]) -> List[float]:
        if any(c <= 0 for c in v):
            raise ValueError("speeds must be positive")
        if sorted(v) != v or len(set(v)) != len(v):
            raise ValueError("speeds must be strictly increasing")
        return v


class StabilityOptions(BaseModel):
    perturbation_size: float = Field(..., ge=0, le=0.1)
    dt: float = Field(..., gt=0)
    t_end: float = Field(..., gt=0)
    record_every: int = Field(10, ge=1)


class KernelOptions(BaseModel):
    samples: int = Field(20, ge=2, description="Grid points used to fit the quadrature constant")
    tol: float = Field(1e-10, gt=0)
    images: int = Field(8, ge=0, description="Periodic images summed before the analytic tail")


class RunConfig(BaseModel):
    command: Literal["solve", "evolve", "kernel", "classify", "sweep-dc", "stability"]
    params: ParamsConfig
    grid: Optional[GridConfig] = None
    solver: SolverOptions = Field(default_factory=SolverOptions)
    evolve: Optional[EvolveOptions] = None
    sweep: Optional[SweepOptions] = None
    stability: Optional[StabilityOptions] = None
    kernel: KernelOptions = Field(default_factory=KernelOptions)
    seed: Optional[int] = Field(None, description="Seed for perturbations, default BOZK_SEED")
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def command_sections(self) -> "RunConfig":
        if self.command != "classify" and self.grid is None:
            raise ValueError(f"command {self.command} needs a grid section")
        required = {"evolve": "evolve", "sweep-dc": "sweep", "stability": "stability"}
        section = required.get(self.command)
        if section and getattr(self, section) is None:
            raise ValueError(f"command {self.command} needs a {section} section")
        return self


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration; pydantic.ValidationError is left to the caller."""

    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError:
        raise ContractError(f"config file {path} not found")
    except json.JSONDecodeError as e:
        raise ContractError(f"config file {path} is not valid JSON: {e}")
    return RunConfig.model_validate(document)


def config_hash(config: RunConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
