"""Corpus ingestion: reference/hypothesis text, human scores, and EMB1
embedding files.

Token strings live in the embedding files and are authoritative for
scoring; the text files exist for alignment validation and reporting.
The EMB1 layout (all little-endian):

    header:  magic "EMB1" | version u16 = 1 | dim u32 | record count u32
    record:  segment_index u32 | token count L u32
             | L x (byte length u16, UTF-8 bytes)
             | L * dim float32, row-major
"""

import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    DimensionMismatch,
    FormatError,
    ParseError,
)
from .similarity import SegmentEmbedding

EMB1_MAGIC = b"EMB1"
EMB1_VERSION = 1

# Sequence delimiters the extractor must strip; their presence means the
# embedding file was produced incorrectly.
RESERVED_TOKENS = ("[CLS]", "[SEP]")

REF_ROLE = "ref"


@dataclass
class EmbeddingRecord:
    segment_index: int
    tokens: list[str]
    matrix: np.ndarray  # L x D float32, exactly as stored on disk


@dataclass
class EmbeddingFile:
    dim: int
    records: list[EmbeddingRecord]

    def segment_indices(self) -> set[int]:
        return {r.segment_index for r in self.records}


@dataclass
class EvaluationCorpus:
    """References, K systems' hypotheses, optional human scores, and
    (once bound) the per-segment embeddings for every role.

    Systems are kept sorted by name so that every downstream reduction
    over systems runs in one canonical order no matter how the corpus
    was assembled.
    """

    references: list[str]
    systems: list[tuple[str, list[str]]]
    human_scores: dict[str, float] | None = None
    embeddings: dict[tuple[str, int], SegmentEmbedding] = field(
        default_factory=dict, repr=False
    )

    def __post_init__(self):
        names = [name for name, _ in self.systems]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ConfigError(f"duplicate system name(s): {sorted(dupes)}")
        if REF_ROLE in names:
            raise ConfigError(
                f"system name {REF_ROLE!r} is reserved for the reference"
            )
        self.systems = sorted(self.systems, key=lambda kv: kv[0])
        n = len(self.references)
        for name, lines in self.systems:
            if len(lines) != n:
                raise AlignmentError(
                    f"system {name!r} has {len(lines)} segments, "
                    f"references have {n}"
                )

    @property
    def n_segments(self) -> int:
        return len(self.references)

    @property
    def k_systems(self) -> int:
        return len(self.systems)

    @property
    def system_names(self) -> list[str]:
        return [name for name, _ in self.systems]

    @property
    def has_embeddings(self) -> bool:
        return bool(self.embeddings)

    def ref_embedding(self, index: int) -> SegmentEmbedding:
        return self.embeddings[(REF_ROLE, index)]

    def system_embedding(self, name: str, index: int) -> SegmentEmbedding:
        return self.embeddings[(name, index)]


def _read_lines(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def read_human_scores(path: Path) -> dict[str, float]:
    """Parse a two-column system<TAB>score file."""
    path = Path(path)
    scores: dict[str, float] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"{path}:{lineno}: expected 2 tab-separated columns, "
                f"got {len(parts)}"
            )
        name, raw = parts
        try:
            value = float(raw)
        except ValueError:
            raise ParseError(
                f"{path}:{lineno}: unparseable score {raw!r}"
            ) from None
        if name in scores:
            raise ParseError(f"{path}:{lineno}: duplicate system {name!r}")
        scores[name] = value
    return scores


def read_metric_table(path: Path) -> dict[str, dict[str, float]]:
    """Parse a multi-metric score table.

    Layout: a header line ``system<TAB>metric1<TAB>metric2...`` followed
    by one row per system. Returns metric -> (system -> score) with the
    file's column order preserved.
    """
    path = Path(path)
    lines = _read_lines(path)
    if not lines:
        raise ParseError(f"{path}: empty score table")
    header = lines[0].split("\t")
    if len(header) < 2 or header[0] != "system":
        raise ParseError(
            f"{path}:1: header must be 'system<TAB>metric...', got {lines[0]!r}"
        )
    metrics = header[1:]
    if len(set(metrics)) != len(metrics):
        raise ParseError(f"{path}:1: duplicate metric column")
    table: dict[str, dict[str, float]] = {m: {} for m in metrics}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(header):
            raise ParseError(
                f"{path}:{lineno}: expected {len(header)} columns, "
                f"got {len(parts)}"
            )
        name = parts[0]
        if name in table[metrics[0]]:
            raise ParseError(f"{path}:{lineno}: duplicate system {name!r}")
        for metric, raw in zip(metrics, parts[1:]):
            try:
                table[metric][name] = float(raw)
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: unparseable score {raw!r}"
                ) from None
    return table


def load_text_corpus(
    refs_path: Path,
    system_paths: Sequence[Path],
    human_scores_path: Path | None = None,
    system_names: Sequence[str] | None = None,
) -> EvaluationCorpus:
    """Load the text side of an evaluation corpus.

    System names default to the hypothesis filename stems. All files
    must agree on the segment count.
    """
    refs_path = Path(refs_path)
    references = _read_lines(refs_path)
    if system_names is None:
        system_names = [Path(p).stem for p in system_paths]
    elif len(system_names) != len(system_paths):
        raise ConfigError(
            f"{len(system_names)} system names for {len(system_paths)} files"
        )
    systems = []
    for name, path in zip(system_names, system_paths):
        lines = _read_lines(Path(path))
        if len(lines) != len(references):
            raise AlignmentError(
                f"{path}: {len(lines)} segments, but {refs_path} has "
                f"{len(references)}"
            )
        systems.append((name, lines))
    human = read_human_scores(human_scores_path) if human_scores_path else None
    return EvaluationCorpus(
        references=references, systems=systems, human_scores=human
    )


class _Cursor:
    """Byte cursor that reports the offset of any truncation."""

    def __init__(self, data: bytes, path: Path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(
                f"{self.path}: truncated payload at byte offset {self.pos} "
                f"(needed {n} more bytes, have {len(self.data) - self.pos})"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def read_emb1(path: Path) -> EmbeddingFile:
    """Read an EMB1 embedding file, fully materialized.

    Raises FormatError for any structural problem: wrong magic, wrong
    version, truncation (with byte offset), out-of-order segment
    indices, reserved delimiter tokens, or trailing bytes.
    """
    path = Path(path)
    cur = _Cursor(path.read_bytes(), path)
    magic = cur.take(4)
    if magic != EMB1_MAGIC:
        raise FormatError(f"{path}: not an EMB1 file (magic {magic!r})")
    version = cur.u16()
    if version != EMB1_VERSION:
        raise FormatError(f"{path}: unsupported EMB1 version {version}")
    dim = cur.u32()
    if dim < 1:
        raise FormatError(f"{path}: embedding dimension must be >= 1, got {dim}")
    n_records = cur.u32()
    records: list[EmbeddingRecord] = []
    prev_index = -1
    for r in range(n_records):
        seg_index = cur.u32()
        if r == 0 and seg_index != 0:
            raise FormatError(
                f"{path}: first record has segment index {seg_index}, expected 0"
            )
        if seg_index <= prev_index:
            raise FormatError(
                f"{path}: segment indices not strictly increasing "
                f"({prev_index} then {seg_index})"
            )
        prev_index = seg_index
        n_tokens = cur.u32()
        tokens = []
        for _ in range(n_tokens):
            length = cur.u16()
            raw = cur.take(length)
            try:
                token = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(
                    f"{path}: record {seg_index}: invalid UTF-8 token: {exc}"
                ) from None
            if token in RESERVED_TOKENS:
                raise FormatError(
                    f"{path}: record {seg_index} contains reserved delimiter "
                    f"token {token!r}; strip special tokens when extracting"
                )
            tokens.append(token)
        payload = cur.take(n_tokens * dim * 4)
        matrix = np.frombuffer(payload, dtype="<f4").reshape(n_tokens, dim)
        records.append(EmbeddingRecord(seg_index, tokens, matrix))
    if cur.pos != len(cur.data):
        raise FormatError(
            f"{path}: {len(cur.data) - cur.pos} trailing bytes at offset {cur.pos}"
        )
    return EmbeddingFile(dim=dim, records=records)


def write_emb1(path: Path, emb: EmbeddingFile) -> None:
    """Write an EMB1 file; the exact inverse of read_emb1."""
    out = bytearray()
    out += EMB1_MAGIC
    out += struct.pack("<HII", EMB1_VERSION, emb.dim, len(emb.records))
    for record in emb.records:
        matrix = np.ascontiguousarray(record.matrix, dtype="<f4")
        if matrix.shape != (len(record.tokens), emb.dim):
            raise FormatError(
                f"record {record.segment_index}: matrix shape {matrix.shape} "
                f"does not match {len(record.tokens)} tokens x dim {emb.dim}"
            )
        out += struct.pack("<II", record.segment_index, len(record.tokens))
        for token in record.tokens:
            raw = token.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise FormatError(
                    f"record {record.segment_index}: token longer than "
                    f"65535 bytes"
                )
            out += struct.pack("<H", len(raw))
            out += raw
        out += matrix.tobytes(order="C")
    Path(path).write_bytes(bytes(out))


def discover_hypothesis_files(hyps_dir: Path) -> list[Path]:
    """Regular files in the hypothesis directory, sorted by name; each
    file is one system, named by its stem."""
    d = Path(hyps_dir)
    if not d.is_dir():
        raise ConfigError(f"not a directory: {d}")
    files = sorted(
        p for p in d.iterdir() if p.is_file() and not p.name.startswith(".")
    )
    if not files:
        raise ConfigError(f"no hypothesis files found in {d}")
    return files


def load_system_embeddings(
    names: Sequence[str], emb_dir: Path
) -> dict[str, EmbeddingFile]:
    """Read <name>.emb1 from the embedding directory for every system."""
    d = Path(emb_dir)
    if not d.is_dir():
        raise ConfigError(f"not a directory: {d}")
    out, missing = {}, []
    for name in names:
        path = d / f"{name}.emb1"
        if not path.is_file():
            missing.append(name)
            continue
        out[name] = read_emb1(path)
    if missing:
        raise ConfigError(
            f"no embedding file for system(s) {missing} in {d}"
        )
    return out


def corpus_from_embedding_files(
    emb_ref_path: Path,
    emb_dir: Path,
    systems: Sequence[str] | None = None,
) -> EvaluationCorpus:
    """A corpus assembled from embedding files alone.

    Text lines are blank placeholders; use this for operations that only
    need embeddings (difficulty export). The segment count is the
    reference file's record count.
    """
    ref_emb = read_emb1(emb_ref_path)
    if systems is None:
        d = Path(emb_dir)
        if not d.is_dir():
            raise ConfigError(f"not a directory: {d}")
        ref_resolved = Path(emb_ref_path).resolve()
        systems = sorted(
            p.stem
            for p in d.iterdir()
            if p.is_file()
            and p.suffix == ".emb1"
            and not p.name.startswith(".")
            and p.resolve() != ref_resolved
            and p.stem != REF_ROLE
        )
        if not systems:
            raise ConfigError(f"no .emb1 files found in {d}")
    sys_embs = load_system_embeddings(systems, emb_dir)
    n = len(ref_emb.records)
    corpus = EvaluationCorpus(
        references=[""] * n,
        systems=[(name, [""] * n) for name in systems],
    )
    return bind_embeddings(corpus, ref_emb, sys_embs)


def _records_by_index(
    emb: EmbeddingFile, n_segments: int, role: str
) -> dict[int, EmbeddingRecord]:
    by_index = {r.segment_index: r for r in emb.records}
    missing = [i for i in range(n_segments) if i not in by_index]
    if missing:
        raise CoverageError(
            f"embeddings for {role!r} missing segment indices {missing}"
        )
    return by_index


def bind_embeddings(
    corpus: EvaluationCorpus,
    ref_emb: EmbeddingFile,
    sys_embs: Mapping[str, EmbeddingFile],
) -> EvaluationCorpus:
    """Attach embeddings to a corpus, validating coverage and dimensions.

    Each file must cover segment indices 0..N-1 (records beyond N-1 are
    ignored) and share the reference file's dimension. Embedding rows
    are validated on the way in, so a bound corpus is ready to score.
    """
    missing = sorted(set(corpus.system_names) - set(sys_embs))
    extra = sorted(set(sys_embs) - set(corpus.system_names))
    if missing or extra:
        raise ConfigError(
            f"embedding files do not match corpus systems "
            f"(missing {missing}, unexpected {extra})"
        )
    for name, emb in sys_embs.items():
        if emb.dim != ref_emb.dim:
            raise DimensionMismatch(
                f"system {name!r} embeddings have dim {emb.dim}, "
                f"reference has {ref_emb.dim}"
            )
    n = corpus.n_segments
    embeddings: dict[tuple[str, int], SegmentEmbedding] = {}
    for role, emb in [(REF_ROLE, ref_emb)] + sorted(sys_embs.items()):
        by_index = _records_by_index(emb, n, role)
        for i in range(n):
            record = by_index[i]
            embeddings[(role, i)] = SegmentEmbedding(
                tokens=list(record.tokens), matrix=record.matrix
            )
    return replace(corpus, embeddings=embeddings)
