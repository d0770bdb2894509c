"""Command-line client for the evaluation service.

Every subcommand builds a request, sends it to the service, and formats
the response as TSV or JSON. By default the service runs in-process
(no server needed); pass --server to target a running instance started
with ``damteval serve``. Floats are printed with exactly six decimals so
outputs are stable enough for golden-file comparison.
"""

import argparse
import json
import sys
from pathlib import Path

import httpx

from .corpus import read_human_scores, read_metric_table
from .errors import ConfigError, DamtevalError


def _format_float(value: float) -> str:
    return format(value, ".6f")


def _render_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _render_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _render_json(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def render_json(obj) -> str:
    out: list[str] = []
    _render_json(obj, out)
    out.append("\n")
    return "".join(out)


def render_tsv(header: list[str], rows: list[list], comments: list[str] = ()) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("NA")
            elif isinstance(cell, float):
                cells.append(_format_float(cell))
            else:
                cells.append(str(cell))
        lines.append("\t".join(cells))
    for comment in comments:
        lines.append(f"# {comment}")
    return "\n".join(lines) + "\n"


class _ServiceError(DamtevalError):
    """Error reported by the service; carries the service's code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process: drive the ASGI app directly, no network involved
    import warnings

    with warnings.catch_warnings():
        # starlette nags about httpx vs httpx2 here (a UserWarning); keep
        # stderr clean for the machine-parseable ERROR lines
        warnings.filterwarnings(
            "ignore", message="Using `httpx` with `starlette.testclient`"
        )
        from fastapi.testclient import TestClient

        from .service import create_app

        return TestClient(create_app())


def _post(args, path: str, payload: dict) -> dict:
    try:
        with _client(args.server) as client:
            response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise _ServiceError("SERVER", f"cannot reach service: {exc}") from None
    if response.status_code != 200:
        try:
            body = response.json()
        except ValueError:
            body = {}
        if "error" in body:
            raise _ServiceError(body["error"]["code"], body["error"]["message"])
        if "detail" in body:
            raise _ServiceError("REQUEST", json.dumps(body["detail"]))
        raise _ServiceError(f"HTTP_{response.status_code}", response.text)
    return response.json()


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_score(args) -> int:
    payload = {
        "refs_path": args.refs,
        "hyps_dir": args.hyps_dir,
        "emb_ref_path": args.emb_ref,
        "emb_dir": args.emb_dir,
        "no_difficulty": args.no_difficulty,
        "exclude_self": args.exclude_self,
    }
    body = _post(args, "/score", payload)
    with_da = body["with_difficulty"]
    header = ["system", "precision", "recall", "f"]
    if with_da:
        header += ["da_precision", "da_recall", "da_f"]
    rows, json_rows = [], []
    for row in body["systems"]:
        cells = [row["system"], row["precision"], row["recall"], row["f"]]
        json_row = {
            "system": row["system"],
            "precision": row["precision"],
            "recall": row["recall"],
            "f": row["f"],
        }
        if with_da:
            cells += [row["da_precision"], row["da_recall"], row["da_f"]]
            json_row.update(
                da_precision=row["da_precision"],
                da_recall=row["da_recall"],
                da_f=row["da_f"],
            )
        rows.append(cells)
        json_rows.append(json_row)
    if args.output == "json":
        _emit(args, render_json({"with_difficulty": with_da, "systems": json_rows}))
    else:
        _emit(args, render_tsv(header, rows))
    return 0


def cmd_bleu(args) -> int:
    body = _post(args, "/bleu", {"refs_path": args.refs, "hyps_dir": args.hyps_dir})
    if args.output == "json":
        _emit(args, render_json(body))
    else:
        rows = [[r["system"], r["bleu"]] for r in body["systems"]]
        _emit(args, render_tsv(["system", "bleu"], rows))
    return 0


def _load_score_tables(args) -> tuple[dict, dict]:
    metric_scores = read_metric_table(args.scores)
    human_scores = read_human_scores(args.human)
    return metric_scores, human_scores


def cmd_correlate(args) -> int:
    metric_scores, human_scores = _load_score_tables(args)
    payload = {
        "metric_scores": metric_scores,
        "human_scores": human_scores,
        "top_fraction": args.top_frac,
        "top_k": args.top_k,
        "tau_variant": args.tau,
    }
    body = _post(args, "/correlate", payload)
    if args.output == "json":
        _emit(args, render_json(body))
        return 0
    header = ["metric", "scope", "n", "pearson_abs", "spearman_abs", "kendall_abs"]
    rows = []
    for m in body["metrics"]:
        block = m["all_systems"]
        rows.append(
            [
                m["metric"],
                "all",
                block["n"],
                block["pearson_r"],
                block["spearman_rho"],
                block["kendall_tau"],
            ]
        )
        if m["top_systems"] is not None:
            top = m["top_systems"]
            rows.append(
                [
                    m["metric"],
                    "top",
                    top["n"],
                    top["pearson_r"],
                    top["spearman_rho"],
                    top["kendall_tau"],
                ]
            )
    _emit(args, render_tsv(header, rows))
    return 0


def cmd_sweep(args) -> int:
    metric_scores, human_scores = _load_score_tables(args)
    payload = {
        "metric_scores": metric_scores,
        "human_scores": human_scores,
        "k_min": args.k_min,
        "tau_variant": args.tau,
    }
    if args.k_max is not None:
        payload["k_max"] = args.k_max
    body = _post(args, "/sweep", payload)
    if args.output == "json":
        _emit(args, render_json(body))
        return 0
    header = ["metric", "k", "kendall", "spearman", "pearson"]
    rows = [
        [p["metric"], p["k"], p["kendall_tau"], p["spearman_rho"], p["pearson_r"]]
        for p in body["points"]
    ]
    comments = [note for p in body["points"] for note in p["notes"]]
    _emit(args, render_tsv(header, rows, comments))
    return 0


def _parse_directions(pairs: list[str]) -> dict[str, str]:
    directions = {}
    for pair in pairs:
        metric, _, direction = pair.partition("=")
        if direction not in ("higher", "lower") or not metric:
            raise ConfigError(
                f"--direction must look like METRIC=higher|lower, got {pair!r}"
            )
        directions[metric] = direction
    return directions


def cmd_rank_report(args) -> int:
    metric_scores, human_scores = _load_score_tables(args)
    payload = {
        "metric_scores": metric_scores,
        "human_scores": human_scores,
        "directions": _parse_directions(args.direction),
    }
    body = _post(args, "/rank-report", payload)
    if args.output == "json":
        _emit(args, render_json(body))
        return 0
    metrics = list(metric_scores)
    header = ["system", "human_score", "human_rank"]
    for metric in metrics:
        header += [f"{metric}_score", f"{metric}_rank", f"{metric}_delta"]
    rows = []
    for row in body["systems"]:
        cells = [row["system"], row["human_score"], row["human_rank"]]
        for metric in metrics:
            cell = row["metrics"][metric]
            cells += [cell["score"], cell["rank"], cell["delta"]]
        rows.append(cells)
    total = ["sum(|delta|)", "", ""]
    for metric in metrics:
        total += ["", "", body["sum_abs_delta"][metric]]
    rows.append(total)
    comments = [
        f"{metric}: {note}"
        for metric in metrics
        for note in body["ties"][metric]
    ]
    _emit(args, render_tsv(header, rows, comments))
    return 0


def cmd_difficulty(args) -> int:
    payload = {
        "emb_ref_path": args.emb_ref,
        "emb_dir": args.emb_dir,
        "systems": args.systems.split(",") if args.systems else None,
        "histogram_bins": args.histogram_bins,
        "per_token": args.per_token,
    }
    body = _post(args, "/difficulty", payload)
    if args.output == "json":
        payload_out = {
            "n_segments": body["n_segments"],
            "k_systems": body["k_systems"],
            "n_tokens": body["n_tokens"],
            "mean_weight": body["mean_weight"],
        }
        if args.per_token:
            payload_out["tokens"] = body["tokens"]
        else:
            payload_out["histogram"] = body["histogram"]
        _emit(args, render_json(payload_out))
        return 0
    if args.per_token:
        rows = [
            [t["segment"], t["token_index"], t["token"], t["weight"]]
            for t in body["tokens"]
        ]
        _emit(args, render_tsv(["segment", "token_index", "token", "weight"], rows))
    else:
        rows = [[b["lower"], b["count"]] for b in body["histogram"]]
        _emit(args, render_tsv(["bin_lower", "count"], rows))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("damteval.service:app", host=args.host, port=args.port)
    return 0


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", choices=["tsv", "json"], default="tsv")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument(
        "--server",
        help="base URL of a running damteval service; default runs in-process",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="damteval",
        description="Difficulty-aware embedding-based MT evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score systems with (DA-)BERTScore")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps-dir", required=True)
    p.add_argument("--emb-ref", required=True)
    p.add_argument("--emb-dir", required=True)
    p.add_argument("--no-difficulty", action="store_true")
    p.add_argument(
        "--exclude-self",
        action="store_true",
        help="leave-one-out difficulty: drop the scored system from the average",
    )
    _add_output_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bleu", help="corpus BLEU baseline per system")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps-dir", required=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("correlate", help="correlations against human scores")
    p.add_argument("--scores", required=True)
    p.add_argument("--human", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--top-frac", type=float)
    group.add_argument("--top-k", type=int)
    p.add_argument("--tau", choices=["a", "b"], default="a")
    _add_output_flags(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("sweep", help="correlations over every top-k subset")
    p.add_argument("--scores", required=True)
    p.add_argument("--human", required=True)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int)
    p.add_argument("--tau", choices=["a", "b"], default="a")
    _add_output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rank-report", help="rank agreement table")
    p.add_argument("--scores", required=True)
    p.add_argument("--human", required=True)
    p.add_argument(
        "--direction",
        action="append",
        default=[],
        metavar="METRIC=higher|lower",
        help="score direction for error-style metrics; repeatable",
    )
    _add_output_flags(p)
    p.set_defaults(func=cmd_rank_report)

    p = sub.add_parser("difficulty", help="export difficulty weights")
    p.add_argument("--emb-ref", required=True)
    p.add_argument("--emb-dir", required=True)
    p.add_argument("--systems", help="comma-separated subset of systems")
    p.add_argument("--histogram-bins", type=int, default=50)
    p.add_argument("--per-token", action="store_true")
    _add_output_flags(p)
    p.set_defaults(func=cmd_difficulty)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DamtevalError as exc:
        print(f"ERROR {exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
