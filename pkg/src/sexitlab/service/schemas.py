"""Pydantic request/response models for the HTTP workbench."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .. import profiles
from ..channels import ChannelSpec


class TermModel(BaseModel):
    degree: int
    weight: float


class ProfileModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    perspective: Literal["edge", "node"] = "edge"
    lambda_: list[TermModel] = Field(alias="lambda")
    rho: list[TermModel]

    def to_profile(self) -> profiles.DegreeProfile:
        return profiles.profile_from_dict(self.model_dump(by_alias=True))


class ChannelModel(BaseModel):
    kind: Literal["bec", "biawgn"]
    param: float
    rate: Optional[float] = None

    def to_spec(self, default_rate: float | None = None) -> ChannelSpec:
        rate = self.rate if self.rate is not None else default_rate
        return ChannelSpec(self.kind, self.param, rate if self.kind == "biawgn" else None)


class ProfileRef(BaseModel):
    """Inline profile or the name of a stored one; exactly one must be set."""
    profile: Optional[ProfileModel] = None
    profile_name: Optional[str] = None


class ExitRequest(ProfileRef):
    channel: ChannelModel
    n_points: int = Field(default=201, ge=2, le=100_000)


class ExitResponse(BaseModel):
    i_a: list[float]
    i_e_vnd: list[float]
    i_e_cnd: list[float]
    design_rate: float


class SexitParams(ProfileRef):
    n: int = Field(ge=8)
    channel: ChannelModel
    m: int = Field(default=1000, ge=1)
    max_iter: int = Field(default=50, ge=1)
    n_grid: int = Field(default=200, ge=2)
    h_mode: Literal["resample_per_trajectory", "fixed_graph"] = "resample_per_trajectory"
    seed: int = 0
    workers: int = Field(default=1, ge=1, le=64)
    include_trajectories: bool = True


class SexitIndependentParams(ProfileRef):
    n: int = Field(ge=8)
    channel: ChannelModel
    ia_points: int = Field(default=21, ge=2)
    samples_per_point: int = Field(default=20, ge=1)
    n_grid: int = Field(default=200, ge=2)
    max_iter: int = Field(default=50, ge=1)
    seed: int = 0
    workers: int = Field(default=1, ge=1, le=64)


class BerParams(ProfileRef):
    n: int = Field(ge=8)
    channel_kind: Literal["bec", "biawgn"]
    points: list[float] = Field(min_length=1)
    min_bit_errors: int = Field(default=200, ge=1)
    max_frames: int = Field(default=2_000_000, ge=1)
    h_refresh: int = Field(default=1, ge=1)
    max_iter: int = Field(default=50, ge=1)
    seed: int = 0
    workers: int = Field(default=1, ge=1, le=64)
    rate: Optional[float] = None


class ThresholdParams(ProfileRef):
    channel_kind: Literal["bec", "biawgn"]
    rate: Optional[float] = None


class AnalyticParams(ExitRequest):
    pass


class BerGainRequest(BaseModel):
    """Gain of job B's BER curve over job A's at the target BER."""
    job_a: str
    job_b: str
    target: float = Field(gt=0.0, lt=1.0)


class BerGainResponse(BaseModel):
    gain: float
    unit: Literal["dB", "delta_epsilon"]


class JobRequest(BaseModel):
    kind: Literal["sexit", "sexit_independent", "ber", "analytic", "threshold"]
    params: dict


class JobOut(BaseModel):
    id: str
    kind: str
    status: Literal["queued", "running", "done", "failed", "cancelled"]
    progress: float
    error: Optional[str] = None
    result_ref: Optional[str] = None


class ProfileOut(BaseModel):
    name: str
    profile: dict
    design_rate: float


class ProfileListOut(BaseModel):
    profiles: list[ProfileOut]
