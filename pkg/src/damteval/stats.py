"""Meta-evaluation statistics over system-level scores.

Pearson r, Spearman rho, and Kendall tau (tau-a by default, tau-b behind
a flag), top-K subsetting by human score, top-K sweeps, and rank
agreement tables. Statistics are computed signed; taking absolute values
is a presentation decision left to the report layer.
"""

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InsufficientSystems, UndefinedCorrelation


@dataclass
class CorrelationResult:
    pearson_r: float
    spearman_rho: float
    kendall_tau: float
    n: int
    absolute: bool = False

    def absolutized(self) -> "CorrelationResult":
        return replace(
            self,
            pearson_r=abs(self.pearson_r),
            spearman_rho=abs(self.spearman_rho),
            kendall_tau=abs(self.kendall_tau),
            absolute=True,
        )


@dataclass
class RankEntry:
    system: str
    metric_score: float
    metric_rank: int
    human_rank: int
    delta: int  # metric_rank - human_rank


@dataclass
class RankReport:
    entries: list[RankEntry]  # ordered by human rank
    sum_abs_delta: int
    ties: list[str]  # human-readable notes for any tie-broken scores


@dataclass
class SweepPoint:
    """One top-k evaluation; statistics that are undefined for this
    subset are None, with the reason recorded in notes."""

    k: int
    pearson_r: float | None
    spearman_rho: float | None
    kendall_tau: float | None
    n: int
    notes: list[str]


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise ConfigError(f"{name} must be a 1-D sequence of scores")
    return v


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient.

    A constant vector leaves the statistic undefined and raises
    UndefinedCorrelation rather than silently returning 0.
    """
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise ConfigError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    n = xv.shape[0]
    if n < 2:
        raise UndefinedCorrelation(f"need at least 2 samples, got {n}")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("correlation undefined for a constant vector")
    prod = sxx * syy
    if prod == 0.0 or math.isinf(prod):
        # the product under/overflowed; split the roots instead
        denom = math.sqrt(sxx) * math.sqrt(syy)
    else:
        denom = math.sqrt(prod)
    return float(xc @ yc) / denom


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties receiving the average of their positions."""
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n)
    sorted_vals = values[order]
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-rank vectors."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise ConfigError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if xv.shape[0] < 2:
        raise UndefinedCorrelation(f"need at least 2 samples, got {xv.shape[0]}")
    return pearson(_average_ranks(xv), _average_ranks(yv))


def _sign(d: float) -> int:
    if d > 0:
        return 1
    if d < 0:
        return -1
    return 0


def _tie_term(values: np.ndarray) -> int:
    """sum over tied groups of t*(t-1)/2."""
    _, counts = np.unique(values, return_counts=True)
    return int(sum(c * (c - 1) // 2 for c in counts))


def kendall(x: Sequence[float], y: Sequence[float], variant: str = "a") -> float:
    """Kendall rank correlation.

    tau-a (default) divides concordant-minus-discordant by the total
    pair count n*(n-1)/2; tau-b applies the tie correction and is
    undefined when either vector is fully tied.
    """
    if variant not in ("a", "b"):
        raise ConfigError(f"unknown Kendall variant {variant!r} (use 'a' or 'b')")
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise ConfigError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    n = xv.shape[0]
    if n < 2:
        raise UndefinedCorrelation(f"need at least 2 samples, got {n}")
    xs = xv.tolist()
    ys = yv.tolist()
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            s += _sign(xs[j] - xs[i]) * _sign(ys[j] - ys[i])
    n0 = n * (n - 1) // 2
    if variant == "a":
        return s / n0
    denom_sq = (n0 - _tie_term(xv)) * (n0 - _tie_term(yv))
    if denom_sq == 0:
        raise UndefinedCorrelation("tau-b undefined: a vector is fully tied")
    return s / math.sqrt(denom_sq)


def correlation_result(
    x: Sequence[float], y: Sequence[float], tau_variant: str = "a"
) -> CorrelationResult:
    """All three statistics over one sample, raw (signed)."""
    return CorrelationResult(
        pearson_r=pearson(x, y),
        spearman_rho=spearman(x, y),
        kendall_tau=kendall(x, y, tau_variant),
        n=len(x),
    )


def _ordered_by_score(scores: Mapping[str, float], higher_better: bool) -> list[str]:
    if higher_better:
        return sorted(scores, key=lambda name: (-scores[name], name))
    return sorted(scores, key=lambda name: (scores[name], name))


def top_k_select(
    human_scores: Mapping[str, float],
    fraction: float | None = None,
    k: int | None = None,
) -> list[str]:
    """The k systems humans ranked best, ordered best-first.

    Exactly one of fraction/k must be given; a fraction maps to
    k = floor(K * fraction). Tied human scores break by system name so
    the subset is deterministic. Selections below 2 systems raise
    InsufficientSystems because no correlation is defined there.
    """
    if (fraction is None) == (k is None):
        raise ConfigError("pass exactly one of fraction or k")
    big_k = len(human_scores)
    if fraction is not None:
        if not 0.0 < fraction <= 1.0:
            raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
        # tiny epsilon so exact products like 10 * 0.3 do not floor to 2
        k = int(math.floor(big_k * fraction + 1e-9))
    assert k is not None
    if k > big_k:
        raise ConfigError(f"k={k} exceeds the {big_k} systems available")
    if k < 2:
        raise InsufficientSystems(
            f"top-K selection of {k} system(s); need at least 2"
        )
    return _ordered_by_score(human_scores, higher_better=True)[:k]


def _check_same_systems(
    metric_scores: Mapping[str, float], human_scores: Mapping[str, float]
) -> None:
    if set(metric_scores) != set(human_scores):
        only_metric = sorted(set(metric_scores) - set(human_scores))
        only_human = sorted(set(human_scores) - set(metric_scores))
        raise ConfigError(
            f"system sets differ (only in metric: {only_metric}, "
            f"only in human: {only_human})"
        )


def top_k_sweep(
    metric_scores: Mapping[str, float],
    human_scores: Mapping[str, float],
    k_range: Iterable[int],
    tau_variant: str = "a",
) -> list[SweepPoint]:
    """Correlations over the top-k human subset for each requested k.

    A statistic that is undefined at some k (constant scores on the
    subset) becomes a marked gap in that sweep point instead of failing
    the whole sweep.
    """
    _check_same_systems(metric_scores, human_scores)
    points = []
    for k in sorted(set(k_range)):
        subset = top_k_select(human_scores, k=k)
        x = [metric_scores[s] for s in subset]
        y = [human_scores[s] for s in subset]
        values: dict[str, float | None] = {}
        notes = []
        for stat_name, fn in (
            ("pearson_r", lambda: pearson(x, y)),
            ("spearman_rho", lambda: spearman(x, y)),
            ("kendall_tau", lambda: kendall(x, y, tau_variant)),
        ):
            try:
                values[stat_name] = fn()
            except UndefinedCorrelation as exc:
                values[stat_name] = None
                notes.append(f"{stat_name} undefined at k={k}: {exc.message}")
        points.append(
            SweepPoint(
                k=k,
                pearson_r=values["pearson_r"],
                spearman_rho=values["spearman_rho"],
                kendall_tau=values["kendall_tau"],
                n=k,
                notes=notes,
            )
        )
    return points


def _dense_ranks(
    scores: Mapping[str, float], higher_better: bool, label: str
) -> tuple[dict[str, int], list[str]]:
    order = _ordered_by_score(scores, higher_better)
    ranks = {name: i + 1 for i, name in enumerate(order)}
    by_score: dict[float, list[str]] = {}
    for name, score in scores.items():
        by_score.setdefault(score, []).append(name)
    ties = [
        f"{label} score {score:g} tied between {sorted(names)}; broken by name"
        for score, names in sorted(by_score.items())
        if len(names) > 1
    ]
    return ranks, ties


def rank_report(
    metric_scores: Mapping[str, float],
    human_scores: Mapping[str, float],
    direction: str = "higher",
) -> RankReport:
    """Rank agreement between a metric and human judgments.

    Rank 1 is best. For error-style metrics pass direction='lower';
    human scores are always higher-better. Entries come back in human
    rank order and deltas are metric rank minus human rank.
    """
    if direction not in ("higher", "lower"):
        raise ConfigError(
            f"direction must be 'higher' or 'lower', got {direction!r}"
        )
    _check_same_systems(metric_scores, human_scores)
    metric_ranks, metric_ties = _dense_ranks(
        metric_scores, direction == "higher", "metric"
    )
    human_ranks, human_ties = _dense_ranks(human_scores, True, "human")
    entries = []
    for system in sorted(human_ranks, key=human_ranks.__getitem__):
        delta = metric_ranks[system] - human_ranks[system]
        entries.append(
            RankEntry(
                system=system,
                metric_score=metric_scores[system],
                metric_rank=metric_ranks[system],
                human_rank=human_ranks[system],
                delta=delta,
            )
        )
    return RankReport(
        entries=entries,
        sum_abs_delta=sum(abs(e.delta) for e in entries),
        ties=metric_ties + human_ties,
    )
