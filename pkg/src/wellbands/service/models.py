"""Request and response schemas for the HTTP service.

Requests reject unknown keys so that a typo in a config file fails
loudly instead of silently falling back to a default.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict

from ..potential import DEFAULT_MASS


class ProblemSpec(BaseModel):
    """A well-train problem plus solver knobs, shared by all endpoints."""

    model_config = ConfigDict(extra="forbid")

    v1: float
    v2: float
    n_cells: int = 2
    mass: float = DEFAULT_MASS
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    tail_phase_tol: float = 1e-12
    scan_points: int = 400


class LevelsRequest(ProblemSpec):
    pass


class BandsRequest(ProblemSpec):
    pass


class SweepRequest(ProblemSpec):
    n_values: list[int] = [2, 4, 6]


class WavefunctionRequest(ProblemSpec):
    index_j: int = 0
    x_min: float | None = None
    x_max: float | None = None
    n_samples: int = 801


class VerifyRequest(ProblemSpec):
    oracle_points: int = 8000
    oracle_padding: float = 12.0
    tolerance: float = 2e-3


class BandEdgeOut(BaseModel):
    energy: float
    branch: int
    well_depth: float


class BandOut(BaseModel):
    band_index: int
    well_depth: float
    lower: BandEdgeOut
    upper: BandEdgeOut


class LevelOut(BaseModel):
    index_j: int
    energy: float
    alpha: float
    beta: float
    band_index: int | None
    location: str


class LevelsReport(BaseModel):
    v1: float
    v2: float
    n_cells: int
    mass: float
    levels: list[LevelOut]
    bands: list[BandOut]


class BandsReport(BaseModel):
    v1: float
    v2: float
    mass: float
    bands: list[BandOut]


class SweepRow(BaseModel):
    n_cells: int
    index_j: int
    energy: float
    band_index: int | None
    location: str


class SweepReport(BaseModel):
    v1: float
    v2: float
    mass: float
    n_values: list[int]
    rows: list[SweepRow]
    bands: list[BandOut]


class WavefunctionReport(BaseModel):
    index_j: int
    energy: float
    xs: list[float]
    values: list[float]


class VerifyRow(BaseModel):
    index_j: int
    energy_phase: float
    energy_fd: float
    abs_diff: float


class VerifyReport(BaseModel):
    count_phase: int
    count_fd: int
    rows: list[VerifyRow]
    max_abs_diff: float | None
    tolerance: float
    order: float | None
    warnings: list[str]
    passed: bool


class ErrorEnvelope(BaseModel):
    category: str
    message: str
