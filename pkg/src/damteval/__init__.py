"""Difficulty-aware embedding-based MT evaluation toolkit."""

from .bleu import NGramStats, corpus_bleu, segment_stats
from .corpus import (
    EmbeddingFile,
    EmbeddingRecord,
    EvaluationCorpus,
    bind_embeddings,
    load_text_corpus,
    read_emb1,
    read_human_scores,
    write_emb1,
)
from .difficulty import (
    DAScores,
    DifficultyMap,
    compute_difficulty,
    da_scores,
    hypothesis_weight,
    system_score,
)
from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    DamtevalError,
    DegenerateEmbedding,
    DimensionMismatch,
    EmptyCorpus,
    EmptySystemSet,
    FormatError,
    InsufficientSystems,
    ParseError,
    UndefinedCorrelation,
)
from .scoring import (
    SystemResult,
    compute_corpus_difficulty,
    difficulty_histogram,
    score_corpus,
    system_bleu_scores,
)
from .similarity import (
    MatchScores,
    SegmentEmbedding,
    SimilarityMatrix,
    build_similarity_matrix,
    cosine_similarity,
    greedy_match,
)
from .stats import (
    CorrelationResult,
    RankReport,
    SweepPoint,
    correlation_result,
    kendall,
    pearson,
    rank_report,
    spearman,
    top_k_select,
    top_k_sweep,
)

__version__ = "0.1.0"
