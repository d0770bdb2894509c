"""Service endpoints binding the core package to the HTTP surface."""

import numpy as np
from fastapi import APIRouter

from ..corpus import (
    bind_embeddings,
    corpus_from_embedding_files,
    discover_hypothesis_files,
    load_system_embeddings,
    load_text_corpus,
    read_emb1,
)
from ..errors import ConfigError
from ..scoring import (
    compute_corpus_difficulty,
    difficulty_histogram,
    score_corpus,
    system_bleu_scores,
)
from ..similarity import _mean_lr
from ..stats import correlation_result, rank_report, top_k_select, top_k_sweep
from . import schemas as s

router = APIRouter()


@router.get("/health")
def health() -> dict:
    return {"status": "ok"}


def _load_bound_corpus(req: s.ScoreRequest):
    hyp_paths = discover_hypothesis_files(req.hyps_dir)
    corpus = load_text_corpus(req.refs_path, hyp_paths)
    ref_emb = read_emb1(req.emb_ref_path)
    sys_embs = load_system_embeddings(corpus.system_names, req.emb_dir)
    return bind_embeddings(corpus, ref_emb, sys_embs)


@router.post("/score", response_model=s.ScoreResponse)
def score(req: s.ScoreRequest) -> s.ScoreResponse:
    corpus = _load_bound_corpus(req)
    rows = score_corpus(
        corpus,
        with_difficulty=not req.no_difficulty,
        exclude_self=req.exclude_self,
        threads=req.threads,
    )
    return s.ScoreResponse(
        with_difficulty=not req.no_difficulty,
        systems=[
            s.SystemScoreRow(
                system=r.system,
                precision=r.precision,
                recall=r.recall,
                f=r.f,
                da_precision=r.da_precision,
                da_recall=r.da_recall,
                da_f=r.da_f,
            )
            for r in rows
        ],
    )


@router.post("/bleu", response_model=s.BleuResponse)
def bleu(req: s.BleuRequest) -> s.BleuResponse:
    hyp_paths = discover_hypothesis_files(req.hyps_dir)
    corpus = load_text_corpus(req.refs_path, hyp_paths)
    scores = system_bleu_scores(corpus)
    return s.BleuResponse(
        systems=[
            s.BleuRow(system=name, bleu=scores[name])
            for name in corpus.system_names
        ]
    )


def _correlation_block(
    metric_scores: dict[str, float],
    human_scores: dict[str, float],
    systems: list[str],
    tau_variant: str,
) -> s.CorrelationBlock:
    x = [metric_scores[name] for name in systems]
    y = [human_scores[name] for name in systems]
    res = correlation_result(x, y, tau_variant).absolutized()
    return s.CorrelationBlock(
        pearson_r=res.pearson_r,
        spearman_rho=res.spearman_rho,
        kendall_tau=res.kendall_tau,
        n=res.n,
        absolute=res.absolute,
    )


@router.post("/correlate", response_model=s.CorrelateResponse)
def correlate(req: s.CorrelateRequest) -> s.CorrelateResponse:
    if not req.metric_scores:
        raise ConfigError("no metric score columns supplied")
    if req.top_fraction is not None and req.top_k is not None:
        raise ConfigError("pass at most one of top_fraction / top_k")
    out = []
    for metric, scores in req.metric_scores.items():
        if set(scores) != set(req.human_scores):
            only_metric = sorted(set(scores) - set(req.human_scores))
            only_human = sorted(set(req.human_scores) - set(scores))
            raise ConfigError(
                f"metric {metric!r} system set differs from human scores "
                f"(only in metric: {only_metric}, only in human: {only_human})"
            )
        all_systems = sorted(scores)
        block_all = _correlation_block(
            scores, req.human_scores, all_systems, req.tau_variant
        )
        block_top, top_k = None, None
        if req.top_fraction is not None or req.top_k is not None:
            subset = top_k_select(
                req.human_scores, fraction=req.top_fraction, k=req.top_k
            )
            top_k = len(subset)
            block_top = _correlation_block(
                scores, req.human_scores, subset, req.tau_variant
            )
        out.append(
            s.MetricCorrelation(
                metric=metric,
                all_systems=block_all,
                top_systems=block_top,
                top_k=top_k,
            )
        )
    return s.CorrelateResponse(tau_variant=req.tau_variant, metrics=out)


@router.post("/sweep", response_model=s.SweepResponse)
def sweep(req: s.SweepRequest) -> s.SweepResponse:
    if not req.metric_scores:
        raise ConfigError("no metric score columns supplied")
    k_max = req.k_max if req.k_max is not None else len(req.human_scores)
    if req.k_min > k_max:
        raise ConfigError(f"k_min {req.k_min} exceeds k_max {k_max}")
    points = []
    for metric, scores in req.metric_scores.items():
        for p in top_k_sweep(
            scores, req.human_scores, range(req.k_min, k_max + 1), req.tau_variant
        ):
            points.append(
                s.SweepPointRow(
                    metric=metric,
                    k=p.k,
                    kendall_tau=p.kendall_tau,
                    spearman_rho=p.spearman_rho,
                    pearson_r=p.pearson_r,
                    notes=p.notes,
                )
            )
    return s.SweepResponse(tau_variant=req.tau_variant, points=points)


@router.post("/rank-report", response_model=s.RankReportResponse)
def rank_report_endpoint(req: s.RankReportRequest) -> s.RankReportResponse:
    if not req.metric_scores:
        raise ConfigError("no metric score columns supplied")
    unknown = sorted(set(req.directions) - set(req.metric_scores))
    if unknown:
        raise ConfigError(f"directions given for unknown metric(s): {unknown}")
    reports = {
        metric: rank_report(
            scores, req.human_scores, req.directions.get(metric, "higher")
        )
        for metric, scores in req.metric_scores.items()
    }
    first = next(iter(reports.values()))
    rows = []
    for entry in first.entries:  # ordered by human rank
        system = entry.system
        cells = {}
        for metric, report in reports.items():
            e = next(x for x in report.entries if x.system == system)
            cells[metric] = s.RankCell(
                score=e.metric_score, rank=e.metric_rank, delta=e.delta
            )
        rows.append(
            s.RankRow(
                system=system,
                human_score=req.human_scores[system],
                human_rank=entry.human_rank,
                metrics=cells,
            )
        )
    return s.RankReportResponse(
        systems=rows,
        sum_abs_delta={m: r.sum_abs_delta for m, r in reports.items()},
        ties={m: r.ties for m, r in reports.items()},
    )


@router.post("/difficulty", response_model=s.DifficultyResponse)
def difficulty(req: s.DifficultyRequest) -> s.DifficultyResponse:
    corpus = corpus_from_embedding_files(
        req.emb_ref_path, req.emb_dir, systems=req.systems
    )
    maps = compute_corpus_difficulty(corpus, threads=req.threads)
    weights = (
        np.concatenate([m.weights for m in maps])
        if maps
        else np.zeros(0)
    )
    response = s.DifficultyResponse(
        n_segments=corpus.n_segments,
        k_systems=corpus.k_systems,
        n_tokens=int(weights.shape[0]),
        mean_weight=_mean_lr(weights),
    )
    if req.per_token:
        response.tokens = [
            s.TokenWeight(
                segment=m.segment_index,
                token_index=i,
                token=tok,
                weight=float(m.weights[i]),
            )
            for m in maps
            for i, tok in enumerate(m.ref_tokens)
        ]
    else:
        response.histogram = [
            s.HistogramBin(lower=lower, count=count)
            for lower, count in difficulty_histogram(
                weights, bins=req.histogram_bins
            )
        ]
    return response
