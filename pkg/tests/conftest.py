import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import toy_data
from damteval import (
    EmbeddingFile,
    EmbeddingRecord,
    bind_embeddings,
    load_text_corpus,
    read_emb1,
    write_emb1,
)

FIXTURES = Path(__file__).parent / "fixtures"


def embedding_file(segments) -> EmbeddingFile:
    """EmbeddingFile from [(tokens, rows), ...] toy segments."""
    records = [
        EmbeddingRecord(
            segment_index=i,
            tokens=list(tokens),
            matrix=np.array(rows, dtype=np.float32).reshape(len(tokens), toy_data.DIM),
        )
        for i, (tokens, rows) in enumerate(segments)
    ]
    return EmbeddingFile(dim=toy_data.DIM, records=records)


def write_toy_tree(root: Path) -> dict[str, Path]:
    """Materialize the toy corpus as text + EMB1 + human-score files."""
    hyps = root / "hyps"
    embs = root / "embs"
    hyps.mkdir(parents=True)
    embs.mkdir()
    refs = root / "refs.txt"
    refs.write_text(
        "".join(line + "\n" for line in toy_data.text_lines(toy_data.REFERENCE)),
        encoding="utf-8",
    )
    write_emb1(embs / "ref.emb1", embedding_file(toy_data.REFERENCE))
    for name, segments in toy_data.SYSTEMS.items():
        (hyps / f"{name}.txt").write_text(
            "".join(line + "\n" for line in toy_data.text_lines(segments)),
            encoding="utf-8",
        )
        write_emb1(embs / f"{name}.emb1", embedding_file(segments))
    human = root / "human.tsv"
    human.write_text(
        "".join(
            f"{name}\t{score}\n"
            for name, score in sorted(toy_data.HUMAN_SCORES.items())
        ),
        encoding="utf-8",
    )
    return {"refs": refs, "hyps": hyps, "embs": embs, "human": human}


@pytest.fixture(scope="session")
def toy_tree(tmp_path_factory) -> dict[str, Path]:
    return write_toy_tree(tmp_path_factory.mktemp("toy"))


@pytest.fixture(scope="session")
def toy_corpus(toy_tree):
    corpus = load_text_corpus(
        toy_tree["refs"],
        sorted(toy_tree["hyps"].iterdir()),
        human_scores_path=toy_tree["human"],
    )
    ref_emb = read_emb1(toy_tree["embs"] / "ref.emb1")
    sys_embs = {
        name: read_emb1(toy_tree["embs"] / f"{name}.emb1")
        for name in toy_data.SYSTEMS
    }
    return bind_embeddings(corpus, ref_emb, sys_embs)


@pytest.fixture(scope="session")
def toy_expected() -> dict:
    with open(FIXTURES / "toy_expected.json", encoding="utf-8") as fh:
        return json.load(fh)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(terminalreporter.stats.get(key, []))
    acceptance = sorted(
        (r for r in reports if "test_acceptance.py" in r.nodeid),
        key=lambda r: r.nodeid,
    )
    if not acceptance:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for report in acceptance:
        status = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"{status}: {report.nodeid.split('::')[-1]}")
