"""Corpus-level BLEU baseline.

Standard corpus BLEU: orders 1..4 with uniform weights, clipped n-gram
matches aggregated over the whole corpus before taking precisions, and a
multiplicative brevity penalty. No smoothing; a zero aggregate precision
zeroes the score. Meant for ranking comparisons against the embedding
metrics, not for parity with any particular external scorer.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import AlignmentError, EmptyCorpus

MAX_ORDER = 4


@dataclass
class NGramStats:
    """Clipped match / total counts per n-gram order plus lengths;
    addable across segments."""

    matches: list[int]  # index n-1 holds order-n counts
    totals: list[int]
    hyp_len: int
    ref_len: int

    def __add__(self, other: "NGramStats") -> "NGramStats":
        return NGramStats(
            matches=[a + b for a, b in zip(self.matches, other.matches)],
            totals=[a + b for a, b in zip(self.totals, other.totals)],
            hyp_len=self.hyp_len + other.hyp_len,
            ref_len=self.ref_len + other.ref_len,
        )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
    )


def segment_stats(
    ref_tokens: Sequence[str], hyp_tokens: Sequence[str]
) -> NGramStats:
    """Sufficient BLEU statistics for one segment pair."""
    matches, totals = [], []
    for n in range(1, MAX_ORDER + 1):
        hyp_counts = _ngrams(hyp_tokens, n)
        ref_counts = _ngrams(ref_tokens, n)
        clipped = sum(
            min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
        )
        matches.append(clipped)
        totals.append(sum(hyp_counts.values()))
    return NGramStats(
        matches=matches,
        totals=totals,
        hyp_len=len(hyp_tokens),
        ref_len=len(ref_tokens),
    )


def corpus_bleu(
    refs: Sequence[Sequence[str]], hyps: Sequence[Sequence[str]]
) -> float:
    """Corpus BLEU over pre-tokenized segments, in [0, 1].

    Counts are merged over segments in order before the precisions are
    formed; the brevity penalty exp(1 - ref_len/hyp_len) applies only
    when the hypothesis side is shorter.
    """
    if len(refs) != len(hyps):
        raise AlignmentError(
            f"{len(refs)} references but {len(hyps)} hypotheses"
        )
    if len(refs) == 0:
        raise EmptyCorpus("BLEU over an empty corpus")
    stats = segment_stats(refs[0], hyps[0])
    for ref, hyp in zip(refs[1:], hyps[1:]):
        stats = stats + segment_stats(ref, hyp)
    log_sum = 0.0
    for n in range(MAX_ORDER):
        if stats.totals[n] == 0 or stats.matches[n] == 0:
            return 0.0
        log_sum += math.log(stats.matches[n] / stats.totals[n]) / MAX_ORDER
    if stats.hyp_len < stats.ref_len:
        brevity = math.exp(1.0 - stats.ref_len / stats.hyp_len)
    else:
        brevity = 1.0
    return brevity * math.exp(log_sum)
