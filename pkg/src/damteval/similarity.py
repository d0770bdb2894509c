"""Cosine similarity, similarity matrices, and greedy token matching.

This is the un-weighted layer: per-token contextual embeddings go in,
recall / precision / F over greedy best matches come out. Embeddings are
consumed exactly as given; normalization and layer selection are the
extractor's business.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEmbedding, DimensionMismatch

# Numerical slack tolerated on the [-1, 1] cosine range. Entries are never
# clipped: values further out indicate a broken extractor and must surface.
RANGE_SLACK = 1e-9


def _mean_lr(values: np.ndarray) -> float:
    """Mean with fixed left-to-right summation; empty input means 0."""
    n = values.shape[0]
    if n == 0:
        return 0.0
    acc = 0.0
    for v in values.tolist():
        acc += v
    return acc / n


def _f_score(precision: float, recall: float) -> float:
    """Harmonic mean with the 0/0 -> 0 convention."""
    s = precision + recall
    if s == 0.0:
        return 0.0
    return 2.0 * precision * recall / s


@dataclass
class SegmentEmbedding:
    """Token strings and their contextual embedding rows for one segment.

    ``matrix`` is L x D with row i embedding token i. Zero rows and
    non-finite values are rejected here, at load time, so downstream
    cosine computations never divide by zero.
    """

    tokens: list[str]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2:
            raise DimensionMismatch(
                f"embedding matrix must be 2-D, got shape {m.shape}"
            )
        if m.shape[1] < 1:
            raise DimensionMismatch("embedding dimension must be at least 1")
        if m.shape[0] != len(self.tokens):
            raise DimensionMismatch(
                f"{len(self.tokens)} tokens but {m.shape[0]} embedding rows"
            )
        if m.size and not np.isfinite(m).all():
            raise DegenerateEmbedding("embedding contains non-finite values")
        if m.shape[0]:
            zero_rows = np.flatnonzero(~m.any(axis=1))
            if zero_rows.size:
                raise DegenerateEmbedding(
                    f"zero embedding vector for token index {int(zero_rows[0])}"
                )
        self.matrix = m

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=1)


@dataclass
class SimilarityMatrix:
    """Pairwise cosine similarities: rows are reference tokens, columns
    hypothesis tokens."""

    values: np.ndarray
    ref_tokens: list[str]
    hyp_tokens: list[str]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (len(self.ref_tokens), len(self.hyp_tokens)):
            raise DimensionMismatch(
                f"similarity matrix shape {v.shape} does not match "
                f"{len(self.ref_tokens)} x {len(self.hyp_tokens)} tokens"
            )
        if v.size:
            lo, hi = float(v.min()), float(v.max())
            if lo < -1.0 - RANGE_SLACK or hi > 1.0 + RANGE_SLACK:
                raise ValueError(
                    f"cosine similarity out of [-1, 1]: range [{lo}, {hi}]"
                )
        self.values = v

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class MatchScores:
    """Greedy-matching recall / precision / F plus the per-token maxima
    they were reduced from."""

    recall: float
    precision: float
    f: float
    per_ref_max: np.ndarray = field(repr=False)
    per_hyp_max: np.ndarray = field(repr=False)


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors.

    The dot product is computed once, so the result is exactly symmetric
    in its arguments. Zero-norm input raises DegenerateEmbedding.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise DimensionMismatch(
            f"cosine similarity needs two equal-length vectors, "
            f"got shapes {a.shape} and {b.shape}"
        )
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateEmbedding("cosine similarity of a zero vector")
    return float(np.dot(a, b)) / (norm_a * norm_b)


def build_similarity_matrix(
    ref: SegmentEmbedding, hyp: SegmentEmbedding
) -> SimilarityMatrix:
    """All-pairs cosine similarities between reference and hypothesis tokens.

    Either segment may be empty, producing a matrix with a zero-length
    axis. Mixing embedding dimensions raises DimensionMismatch.
    """
    if ref.dim != hyp.dim:
        raise DimensionMismatch(
            f"reference embeddings have dim {ref.dim}, hypothesis {hyp.dim}"
        )
    dots = ref.matrix @ hyp.matrix.T
    norms = np.outer(ref.row_norms(), hyp.row_norms())
    values = dots / norms if dots.size else dots
    return SimilarityMatrix(values, list(ref.tokens), list(hyp.tokens))


def greedy_match(sim: SimilarityMatrix) -> MatchScores:
    """Recall/precision/F from per-token greedy maxima.

    Recall takes the max over each row (best hypothesis token per
    reference token), precision over each column. Max over an empty axis
    is 0, the mean over an empty axis is 0, and F follows the 0/0 -> 0
    convention, so degenerate segments score 0 instead of erroring.
    """
    n_ref, n_hyp = sim.shape
    if n_hyp == 0:
        per_ref_max = np.zeros(n_ref)
    else:
        per_ref_max = sim.values.max(axis=1)
    if n_ref == 0:
        per_hyp_max = np.zeros(n_hyp)
    else:
        per_hyp_max = sim.values.max(axis=0)
    recall = _mean_lr(per_ref_max)
    precision = _mean_lr(per_hyp_max)
    return MatchScores(
        recall=recall,
        precision=precision,
        f=_f_score(precision, recall),
        per_ref_max=per_ref_max,
        per_hyp_max=per_hyp_max,
    )
