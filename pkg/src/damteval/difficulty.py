"""Cross-system difficulty weights and difficulty-aware scores.

A reference token that most systems fail to match closely is hard, and
hard tokens should count for more. The weight of reference token t is

    d(t) = 1 - (1/K) * sum_k max over system-k tokens of sim(t, h)

and the difficulty-aware recall/precision reweight the greedy maxima by
d(t) on the reference side and by a matching-occurrence lookup on the
hypothesis side (tokens absent from the reference keep weight 1).
Weights are deliberately not renormalized, so difficulty-aware scores sit
on a much smaller scale than their vanilla counterparts.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyCorpus, EmptySystemSet
from .similarity import (
    RANGE_SLACK,
    MatchScores,
    SegmentEmbedding,
    SimilarityMatrix,
    _f_score,
    _mean_lr,
    build_similarity_matrix,
    greedy_match,
)


@dataclass
class DifficultyMap:
    """Per-token difficulty weights for one reference segment."""

    segment_index: int
    weights: np.ndarray
    ref_tokens: list[str]
    k_systems: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (len(self.ref_tokens),):
            raise DimensionMismatch(
                f"{len(self.ref_tokens)} reference tokens but "
                f"{w.shape} weight vector"
            )
        if self.k_systems < 1:
            raise EmptySystemSet("difficulty requires at least one system")
        if w.size:
            lo, hi = float(w.min()), float(w.max())
            if lo < -RANGE_SLACK or hi > 2.0 + RANGE_SLACK:
                raise ValueError(f"difficulty weight out of [0, 2]: [{lo}, {hi}]")
        self.weights = w


@dataclass
class DAScores:
    """Difficulty-aware scores for one (reference, hypothesis) pair,
    alongside the unweighted scores they derive from."""

    da_recall: float
    da_precision: float
    da_f: float
    raw: MatchScores = field(repr=False)


def row_maxima(sim: SimilarityMatrix) -> np.ndarray:
    """Best similarity each reference token attains; 0 when the
    hypothesis is empty."""
    n_ref, n_hyp = sim.shape
    if n_hyp == 0:
        return np.zeros(n_ref)
    return sim.values.max(axis=1)


def difficulty_from_maxima(
    maxima: Sequence[np.ndarray],
    ref_tokens: list[str],
    segment_index: int = 0,
) -> DifficultyMap:
    """Difficulty weights from precomputed per-system best-match vectors.

    Contributions are accumulated sequentially in the order given, which
    callers must keep canonical (corpus system order) for bit-identical
    results.
    """
    k = len(maxima)
    if k == 0:
        raise EmptySystemSet("difficulty requires at least one system")
    acc = np.zeros(len(ref_tokens))
    for m in maxima:
        if m.shape != acc.shape:
            raise DimensionMismatch(
                f"per-system maxima length {m.shape} does not match "
                f"{len(ref_tokens)} reference tokens"
            )
        acc = acc + m
    weights = 1.0 - acc / k
    return DifficultyMap(
        segment_index=segment_index,
        weights=weights,
        ref_tokens=list(ref_tokens),
        k_systems=k,
    )


def compute_difficulty(
    ref: SegmentEmbedding,
    hyps: Sequence[SegmentEmbedding],
    segment_index: int = 0,
) -> DifficultyMap:
    """Difficulty weights for one reference against K system hypotheses.

    All hypotheses must belong to the same segment; the sum over systems
    runs in list order.
    """
    if len(hyps) == 0:
        raise EmptySystemSet("difficulty requires at least one system")
    maxima = [row_maxima(build_similarity_matrix(ref, h)) for h in hyps]
    return difficulty_from_maxima(maxima, list(ref.tokens), segment_index)


def hypothesis_weight(
    token: str, hyp_index: int, sim: SimilarityMatrix, dmap: DifficultyMap
) -> float:
    """Difficulty weight applied to one hypothesis token.

    A token whose surface string never occurs in the reference keeps
    weight 1. Otherwise the weight of the matching reference occurrence
    is used; among duplicate occurrences the one most similar to this
    hypothesis token wins, ties going to the lowest reference index.
    """
    if len(dmap.weights) != sim.shape[0]:
        raise DimensionMismatch(
            "difficulty map and similarity matrix disagree on reference length"
        )
    best_index = -1
    best_sim = -np.inf
    for i, ref_token in enumerate(dmap.ref_tokens):
        if ref_token != token:
            continue
        s = float(sim.values[i, hyp_index])
        if s > best_sim:
            best_sim = s
            best_index = i
    if best_index < 0:
        return 1.0
    return float(dmap.weights[best_index])


def da_scores(sim: SimilarityMatrix, dmap: DifficultyMap) -> DAScores:
    """Difficulty-aware recall/precision/F for one similarity matrix.

    Empty axes follow the same degenerate conventions as greedy_match:
    means over an empty axis are 0 and F uses the 0/0 -> 0 rule.
    """
    raw = greedy_match(sim)
    n_ref, n_hyp = sim.shape
    if len(dmap.weights) != n_ref:
        raise DimensionMismatch(
            "difficulty map and similarity matrix disagree on reference length"
        )
    da_recall = _mean_lr(dmap.weights * raw.per_ref_max)
    if n_hyp:
        hyp_weights = np.array(
            [
                hypothesis_weight(tok, j, sim, dmap)
                for j, tok in enumerate(sim.hyp_tokens)
            ]
        )
        da_precision = _mean_lr(hyp_weights * raw.per_hyp_max)
    else:
        da_precision = 0.0
    return DAScores(
        da_recall=da_recall,
        da_precision=da_precision,
        da_f=_f_score(da_precision, da_recall),
        raw=raw,
    )


def system_score(per_segment: Sequence[DAScores]) -> float:
    """System-level score: plain mean of per-segment difficulty-aware F,
    summed in segment order."""
    if len(per_segment) == 0:
        raise EmptyCorpus("system score over zero segments")
    return _mean_lr(np.array([s.da_f for s in per_segment]))
