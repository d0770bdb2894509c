"""Corpus-level scoring pipeline.

Runs the similarity / difficulty machinery across every segment of a
bound EvaluationCorpus and aggregates per-system results. Segments are
scored independently (optionally across a thread pool sized by the
DAMTEVAL_THREADS environment variable) and merged in segment order, so
the output is identical whatever the worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bleu import corpus_bleu
from .corpus import EvaluationCorpus
from .difficulty import (
    DAScores,
    DifficultyMap,
    da_scores,
    difficulty_from_maxima,
    row_maxima,
)
from .errors import ConfigError, EmptyCorpus, EmptySystemSet
from .similarity import _mean_lr, build_similarity_matrix, greedy_match

THREADS_ENV_VAR = "DAMTEVAL_THREADS"


@dataclass
class SystemResult:
    """Corpus-level scores for one system: means over segments of the
    segment-level quantities."""

    system: str
    precision: float
    recall: float
    f: float
    da_precision: float | None = None
    da_recall: float | None = None
    da_f: float | None = None


def resolve_thread_count(explicit: int | None = None) -> int:
    """Worker count from the explicit argument or DAMTEVAL_THREADS;
    0 or unset means auto."""
    if explicit is None:
        raw = os.environ.get(THREADS_ENV_VAR, "0")
        try:
            explicit = int(raw)
        except ValueError:
            raise ConfigError(
                f"{THREADS_ENV_VAR} must be an integer, got {raw!r}"
            ) from None
    if explicit < 0:
        raise ConfigError(f"thread count must be >= 0, got {explicit}")
    if explicit == 0:
        return os.cpu_count() or 1
    return explicit


def _map_segments(
    fn: Callable[[int], object], n: int, threads: int | None
) -> list:
    workers = resolve_thread_count(threads)
    if workers == 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


def _require_embeddings(corpus: EvaluationCorpus) -> None:
    if not corpus.has_embeddings:
        raise ConfigError("corpus has no embeddings bound; scoring needs them")


def _segment_scores(
    corpus: EvaluationCorpus,
    index: int,
    with_difficulty: bool,
    exclude_self: bool,
) -> dict:
    """Per-system scores for one segment: DAScores when difficulty is
    on, plain MatchScores otherwise."""
    ref = corpus.ref_embedding(index)
    names = corpus.system_names
    sims = {
        name: build_similarity_matrix(ref, corpus.system_embedding(name, index))
        for name in names
    }
    if not with_difficulty:
        return {name: greedy_match(sims[name]) for name in names}
    maxima = {name: row_maxima(sims[name]) for name in names}
    out = {}
    if exclude_self:
        if len(names) < 2:
            raise EmptySystemSet(
                "leave-one-out difficulty needs at least 2 systems"
            )
        for name in names:
            dmap = difficulty_from_maxima(
                [maxima[other] for other in names if other != name],
                ref.tokens,
                segment_index=index,
            )
            out[name] = da_scores(sims[name], dmap)
    else:
        dmap = difficulty_from_maxima(
            [maxima[name] for name in names], ref.tokens, segment_index=index
        )
        for name in names:
            out[name] = da_scores(sims[name], dmap)
    return out


def score_corpus(
    corpus: EvaluationCorpus,
    with_difficulty: bool = True,
    exclude_self: bool = False,
    threads: int | None = None,
) -> list[SystemResult]:
    """Score every system of a bound corpus; rows sorted by system name.

    With difficulty enabled each row additionally carries the
    difficulty-aware precision/recall/F means.
    """
    _require_embeddings(corpus)
    if corpus.n_segments == 0:
        raise EmptyCorpus("cannot score a corpus with zero segments")
    per_segment = _map_segments(
        lambda i: _segment_scores(corpus, i, with_difficulty, exclude_self),
        corpus.n_segments,
        threads,
    )
    rows = []
    for name in corpus.system_names:
        if with_difficulty:
            das: list[DAScores] = [seg[name] for seg in per_segment]
            raws = [d.raw for d in das]
        else:
            raws = [seg[name] for seg in per_segment]
            das = []
        row = SystemResult(
            system=name,
            precision=_mean_lr(np.array([m.precision for m in raws])),
            recall=_mean_lr(np.array([m.recall for m in raws])),
            f=_mean_lr(np.array([m.f for m in raws])),
        )
        if with_difficulty:
            row.da_precision = _mean_lr(np.array([d.da_precision for d in das]))
            row.da_recall = _mean_lr(np.array([d.da_recall for d in das]))
            row.da_f = _mean_lr(np.array([d.da_f for d in das]))
        rows.append(row)
    return rows


def compute_corpus_difficulty(
    corpus: EvaluationCorpus,
    systems: Sequence[str] | None = None,
    threads: int | None = None,
) -> list[DifficultyMap]:
    """Per-segment difficulty maps over all systems or a named subset."""
    _require_embeddings(corpus)
    if systems is None:
        names = corpus.system_names
    else:
        unknown = sorted(set(systems) - set(corpus.system_names))
        if unknown:
            raise ConfigError(f"unknown system(s) in subset: {unknown}")
        # canonical corpus order, not caller order
        names = [n for n in corpus.system_names if n in set(systems)]
    if not names:
        raise EmptySystemSet("difficulty requires at least one system")

    def one(index: int) -> DifficultyMap:
        ref = corpus.ref_embedding(index)
        maxima = [
            row_maxima(
                build_similarity_matrix(
                    ref, corpus.system_embedding(name, index)
                )
            )
            for name in names
        ]
        return difficulty_from_maxima(maxima, ref.tokens, segment_index=index)

    return _map_segments(one, corpus.n_segments, threads)


def difficulty_histogram(
    weights: np.ndarray, bins: int = 50
) -> list[tuple[float, int]]:
    """(bin lower edge, count) pairs over [0, 2]; weights are clipped
    into range for binning only."""
    if bins < 1:
        raise ConfigError(f"histogram needs at least 1 bin, got {bins}")
    clipped = np.clip(np.asarray(weights, dtype=np.float64), 0.0, 2.0)
    counts, edges = np.histogram(clipped, bins=bins, range=(0.0, 2.0))
    return [(float(edges[i]), int(counts[i])) for i in range(bins)]


def system_bleu_scores(corpus: EvaluationCorpus) -> dict[str, float]:
    """Corpus BLEU per system over whitespace-tokenized text lines."""
    refs = [line.split() for line in corpus.references]
    return {
        name: corpus_bleu(refs, [line.split() for line in lines])
        for name, lines in corpus.systems
    }
