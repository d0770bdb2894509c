"""Pydantic request/response models for the evaluation service.

File-heavy operations (scoring, difficulty export) take server-local
paths; the statistics endpoints take score tables inline.
"""

from typing import Literal

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    code: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody


class ScoreRequest(BaseModel):
    refs_path: str
    hyps_dir: str
    emb_ref_path: str
    emb_dir: str
    no_difficulty: bool = False
    exclude_self: bool = False
    threads: int | None = Field(
        default=None, description="worker override; None defers to DAMTEVAL_THREADS"
    )


class SystemScoreRow(BaseModel):
    system: str
    precision: float
    recall: float
    f: float
    da_precision: float | None = None
    da_recall: float | None = None
    da_f: float | None = None


class ScoreResponse(BaseModel):
    with_difficulty: bool
    systems: list[SystemScoreRow]


class BleuRequest(BaseModel):
    refs_path: str
    hyps_dir: str


class BleuRow(BaseModel):
    system: str
    bleu: float


class BleuResponse(BaseModel):
    systems: list[BleuRow]


class CorrelationBlock(BaseModel):
    pearson_r: float
    spearman_rho: float
    kendall_tau: float
    n: int
    absolute: bool


class MetricCorrelation(BaseModel):
    metric: str
    all_systems: CorrelationBlock
    top_systems: CorrelationBlock | None = None
    top_k: int | None = None


class CorrelateRequest(BaseModel):
    metric_scores: dict[str, dict[str, float]]
    human_scores: dict[str, float]
    top_fraction: float | None = None
    top_k: int | None = None
    tau_variant: Literal["a", "b"] = "a"


class CorrelateResponse(BaseModel):
    tau_variant: Literal["a", "b"]
    metrics: list[MetricCorrelation]


class SweepRequest(BaseModel):
    metric_scores: dict[str, dict[str, float]]
    human_scores: dict[str, float]
    k_min: int = 2
    k_max: int | None = None
    tau_variant: Literal["a", "b"] = "a"


class SweepPointRow(BaseModel):
    metric: str
    k: int
    kendall_tau: float | None
    spearman_rho: float | None
    pearson_r: float | None
    notes: list[str]


class SweepResponse(BaseModel):
    tau_variant: Literal["a", "b"]
    points: list[SweepPointRow]


class RankReportRequest(BaseModel):
    metric_scores: dict[str, dict[str, float]]
    human_scores: dict[str, float]
    directions: dict[str, Literal["higher", "lower"]] = Field(
        default_factory=dict,
        description="per-metric score direction; metrics default to higher-better",
    )


class RankCell(BaseModel):
    score: float
    rank: int
    delta: int


class RankRow(BaseModel):
    system: str
    human_score: float
    human_rank: int
    metrics: dict[str, RankCell]


class RankReportResponse(BaseModel):
    systems: list[RankRow]
    sum_abs_delta: dict[str, int]
    ties: dict[str, list[str]]


class DifficultyRequest(BaseModel):
    emb_ref_path: str
    emb_dir: str
    systems: list[str] | None = None
    histogram_bins: int = 50
    per_token: bool = False
    threads: int | None = None


class HistogramBin(BaseModel):
    lower: float
    count: int


class TokenWeight(BaseModel):
    segment: int
    token_index: int
    token: str
    weight: float


class DifficultyResponse(BaseModel):
    n_segments: int
    k_systems: int
    n_tokens: int
    mean_weight: float
    histogram: list[HistogramBin] | None = None
    tokens: list[TokenWeight] | None = None
