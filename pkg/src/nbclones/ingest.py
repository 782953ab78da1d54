"""Corpus manifest loading and notebook parsing.

A corpus is described by a tab-separated manifest
(``notebook_id<TAB>repo_id<TAB>is_fork<TAB>file_path``). Each notebook file
is parsed into code snippets with line counts; files that cannot be parsed
keep a record with a parse status describing what went wrong, so corpus
accounting stays exact.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from nbclones import nearmiss, stats
from nbclones.errors import ValidationError

_LFS_MARKER = b"version https://git-lfs.github.com/spec"


class ParseStatus(enum.Enum):
    """What parsing a notebook file yielded."""

    OK = "OK"
    NOT_JSON = "NOT_JSON"                  # undecodable or not JSON at all
    ILL_FORMED = "ILL_FORMED"              # JSON without a notebook shape
    LFS_POINTER = "LFS_POINTER"            # large-file pointer, content absent
    CELLS_UNREADABLE = "CELLS_UNREADABLE"  # cell container unusable: no cells
    CODE_UNREADABLE = "CODE_UNREADABLE"    # cell count known, sources not


#: Statuses whose records take part in corpus analyses (the unreadable
#: variants contribute "no cells" / "no code" rather than being dropped).
ANALYZED_STATUSES = frozenset(
    {ParseStatus.OK, ParseStatus.CELLS_UNREADABLE, ParseStatus.CODE_UNREADABLE}
)


@dataclass(frozen=True)
class ManifestEntry:
    notebook_id: str
    repo_id: str
    is_fork: bool
    file_path: str


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: Path

    def active_entries(self) -> tuple[ManifestEntry, ...]:
        """Entries that enter the analyses: fork-flagged ones never do."""
        return tuple(e for e in self.entries if not e.is_fork)


@dataclass(frozen=True)
class LanguageEvidence:
    """Raw language declarations found in one notebook.

    ``info_name``, ``notebook_language`` and ``kernel_language`` come from
    notebook metadata; ``cell_languages`` has one entry per code cell.
    """

    info_name: str | None
    notebook_language: str | None
    kernel_language: str | None
    cell_languages: tuple[str | None, ...]


EMPTY_EVIDENCE = LanguageEvidence(None, None, None, ())

# (notebook id, cell index) pair addressing one snippet across the corpus
SnippetRef = tuple[str, int]


@dataclass(frozen=True)
class Snippet:
    """One code cell: source lines plus the three line counts."""

    notebook_id: str
    cell_index: int
    source: tuple[str, ...]
    loc_total: int
    loc_nonblank: int
    sloc: int

    @property
    def text(self) -> str:
        return "\n".join(self.source)

    @property
    def ref(self) -> SnippetRef:
        return (self.notebook_id, self.cell_index)


@dataclass(frozen=True)
class NotebookRecord:
    notebook_id: str
    repo_id: str
    byte_size: int
    content_digest: str
    parse_status: ParseStatus
    code_cells: tuple[Snippet, ...]
    language_evidence: LanguageEvidence


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a corpus manifest; blank lines are skipped.

    Raises ValidationError naming the offending line for malformed records
    and duplicated notebook ids.
    """
    path = Path(path)
    entries: list[ManifestEntry] = []
    first_seen: dict[str, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").split("\n"), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ValidationError(
                f"manifest line {lineno}: expected 4 tab-separated fields, "
                f"got {len(fields)}"
            )
        nb_id, repo_id, fork_flag, file_path = fields
        if fork_flag not in ("0", "1"):
            raise ValidationError(
                f"manifest line {lineno}: is_fork must be 0 or 1, got {fork_flag!r}"
            )
        if not nb_id or not repo_id or not file_path:
            raise ValidationError(f"manifest line {lineno}: empty field")
        if nb_id in first_seen:
            raise ValidationError(
                f"duplicate notebook id {nb_id!r} "
                f"(lines {first_seen[nb_id]} and {lineno})"
            )
        first_seen[nb_id] = lineno
        entries.append(ManifestEntry(nb_id, repo_id, fork_flag == "1", file_path))
    return CorpusManifest(tuple(entries), path.parent)


# ---------------------------------------------------------------------------
# line counting
# ---------------------------------------------------------------------------


def count_lines(lines: Sequence[str]) -> tuple[int, int, int]:
    """(loc_total, loc_nonblank, sloc) for a snippet's lines.

    sloc counts the lines that still carry non-whitespace content after
    comment stripping, so a comment-only line is in loc_nonblank but not
    in sloc. Always sloc <= loc_nonblank <= loc_total.
    """
    lines = list(lines)
    total = len(lines)
    if total == 0:
        return (0, 0, 0)
    nonblank = sum(1 for line in lines if line.strip())
    stripped = nearmiss.strip_comments("\n".join(lines))
    sloc = sum(1 for line in stripped.split("\n") if line.strip())
    return (total, nonblank, sloc)


# ---------------------------------------------------------------------------
# notebook parsing
# ---------------------------------------------------------------------------

_UNREADABLE = object()


def _cell_container(doc: dict) -> list | None | object:
    """The notebook's cell list; None if absent, _UNREADABLE if unusable.

    Supports both document shapes seen in the wild: a top-level ``cells``
    list, and the older ``worksheets`` list whose sheets each carry their
    own cells.
    """
    if "cells" in doc:
        cells = doc["cells"]
        return cells if isinstance(cells, list) else _UNREADABLE
    if "worksheets" in doc:
        sheets = doc["worksheets"]
        if not isinstance(sheets, list):
            return _UNREADABLE
        merged: list = []
        for sheet in sheets:
            if not isinstance(sheet, dict) or not isinstance(sheet.get("cells"), list):
                return _UNREADABLE
            merged.extend(sheet["cells"])
        return merged
    return None


def _normalize_source(value) -> tuple[str, ...] | None:
    """Cell source as a line tuple; None when the field is unreadable.

    Accepts a string or a list of strings (concatenated). LF and CRLF both
    end lines; a trailing newline does not create an extra line.
    """
    if isinstance(value, str):
        text = value
    elif isinstance(value, list) and all(isinstance(part, str) for part in value):
        text = "".join(value)
    else:
        return None
    if text == "":
        return ()
    if text.endswith("\n"):
        text = text[:-1]
    return tuple(
        line[:-1] if line.endswith("\r") else line for line in text.split("\n")
    )


def _metadata_evidence(doc: dict) -> tuple[str | None, str | None, str | None]:
    def as_str(value):
        return value if isinstance(value, str) else None

    metadata = doc.get("metadata")
    if not isinstance(metadata, dict):
        return (None, None, None)
    info = metadata.get("language_info")
    kernel = metadata.get("kernelspec")
    return (
        as_str(info.get("name")) if isinstance(info, dict) else None,
        as_str(metadata.get("language")),
        as_str(kernel.get("language")) if isinstance(kernel, dict) else None,
    )


def parse_notebook(raw: bytes, entry: ManifestEntry) -> NotebookRecord:
    """Parse one notebook file into a record; never raises on bad content."""

    def record(status, cells=(), evidence=EMPTY_EVIDENCE):
        return NotebookRecord(
            notebook_id=entry.notebook_id,
            repo_id=entry.repo_id,
            byte_size=len(raw),
            content_digest=hashlib.md5(raw).hexdigest(),
            parse_status=status,
            code_cells=tuple(cells),
            language_evidence=evidence,
        )

    if raw.split(b"\n", 1)[0].startswith(_LFS_MARKER):
        return record(ParseStatus.LFS_POINTER)
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return record(ParseStatus.NOT_JSON)
    if not isinstance(doc, dict):
        return record(ParseStatus.ILL_FORMED)

    meta_fields = _metadata_evidence(doc)
    container = _cell_container(doc)
    if container is None:
        return record(ParseStatus.ILL_FORMED, evidence=LanguageEvidence(*meta_fields, ()))
    if container is _UNREADABLE:
        return record(
            ParseStatus.CELLS_UNREADABLE, evidence=LanguageEvidence(*meta_fields, ())
        )

    code_cells = [
        cell
        for cell in container
        if isinstance(cell, dict) and cell.get("cell_type") == "code"
    ]
    cell_languages = tuple(
        cell["language"] if isinstance(cell.get("language"), str) else None
        for cell in code_cells
    )
    evidence = LanguageEvidence(*meta_fields, cell_languages)

    sources = []
    status = ParseStatus.OK
    for cell in code_cells:
        value = cell.get("source", cell.get("input", ""))
        normalized = _normalize_source(value)
        if normalized is None:
            status = ParseStatus.CODE_UNREADABLE
            break
        sources.append(normalized)
    if status is ParseStatus.CODE_UNREADABLE:
        sources = [() for _ in code_cells]  # count known, content not

    snippets = []
    for index, lines in enumerate(sources):
        total, nonblank, sloc = count_lines(lines)
        snippets.append(
            Snippet(entry.notebook_id, index, tuple(lines), total, nonblank, sloc)
        )
    return record(status, snippets, evidence)


def read_notebook(entry: ManifestEntry, base_dir: str | Path) -> NotebookRecord:
    """Read and parse the file behind a manifest entry.

    Relative paths resolve against the manifest's directory. I/O failures
    propagate as OSError; content problems land in the parse status.
    """
    raw = (Path(base_dir) / entry.file_path).read_bytes()
    return parse_notebook(raw, entry)


# ---------------------------------------------------------------------------
# corpus size summary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SizeStats:
    """Distribution summaries of notebook sizes, one row per metric."""

    byte_size: stats.SummaryRow
    code_cells: stats.SummaryRow
    loc_nonblank: stats.SummaryRow
    loc_total: stats.SummaryRow

    def as_ordered_pairs(self) -> list[tuple[str, stats.SummaryRow]]:
        return [
            ("bytes", self.byte_size),
            ("code_cells", self.code_cells),
            ("loc_nonblank", self.loc_nonblank),
            ("loc_total", self.loc_total),
        ]


def summarize_corpus(records: Iterable[NotebookRecord]) -> SizeStats:
    """Size summaries over notebook records (needs at least one record)."""
    records = list(records)
    if not records:
        raise ValidationError("cannot summarize an empty corpus")
    return SizeStats(
        byte_size=stats.summarize([r.byte_size for r in records]),
        code_cells=stats.summarize([len(r.code_cells) for r in records]),
        loc_nonblank=stats.summarize(
            [sum(s.loc_nonblank for s in r.code_cells) for r in records]
        ),
        loc_total=stats.summarize(
            [sum(s.loc_total for s in r.code_cells) for r in records]
        ),
    )
