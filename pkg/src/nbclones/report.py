"""End-to-end corpus analysis: parse, classify, detect clones, emit tables.

The pipeline runs ingest -> language classification -> exact clone grouping
-> near-miss detection (on one language's notebooks) -> connection graphs
-> rank statistics, and collects everything into a :class:`ReportBundle`.
When an output directory is given, the bundle is also written to disk as a
set of CSV tables plus figure datasets; all writes are deterministic, so
two runs over the same corpus and configuration produce byte-identical
artifacts regardless of worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import cmw, connections, ingest, langid, nearmiss, stats
from .errors import ValidationError

__all__ = [
    "PipelineConfig",
    "ReportBundle",
    "CmwReport",
    "NearMissReport",
    "ConnectionReport",
    "CloneStatTables",
    "PairwiseComparison",
    "TopClone",
    "run_pipeline",
    "write_bundle",
    "top_clones",
]

# histogram bin widths for the figure datasets
BYTES_BIN_WIDTH = 1024.0
COUNT_BIN_WIDTH = 1.0
PERCENT_BIN_WIDTH = 5.0


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of a pipeline run.

    ``workers`` only affects scheduling, never results, and is therefore
    excluded from the recorded run manifest.
    """

    theta: float = 0.8
    min_tokens: int = 0
    max_tokens: int = 500_000_000
    nearmiss_language: str = "PYTHON"
    include_empty: bool = False
    notebook_clones_include_empty: bool = True
    normalized_includes_empty: bool = True
    selfloop_mode: str = "single"
    digest_algorithm: str = "md5"
    top_n: int = 20
    min_loc: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        self.detector_config()  # validates theta and the token window
        if self.selfloop_mode not in connections.SELFLOOP_MODES:
            raise ValidationError(
                f"selfloop_mode must be one of {connections.SELFLOOP_MODES}"
            )
        object.__setattr__(self, "nearmiss_language", self.nearmiss_language.upper())
        if self.nearmiss_language not in langid.LanguageGroup.__members__:
            raise ValidationError(
                f"unknown language group {self.nearmiss_language!r}"
            )
        if self.top_n < 1:
            raise ValidationError("top_n must be positive")
        if self.min_loc < 0:
            raise ValidationError("min_loc must be non-negative")
        if self.workers < 1:
            raise ValidationError("workers must be positive")

    def detector_config(self) -> nearmiss.DetectorConfig:
        return nearmiss.DetectorConfig(self.theta, self.min_tokens, self.max_tokens)


@dataclass(frozen=True)
class CloneStatTables:
    """Distribution rows for clone sizes, group sizes and frequencies."""

    clone_sizes: stats.SummaryRow | None
    group_sizes: stats.SummaryRow | None
    frequencies_percent: stats.SummaryRow | None


@dataclass(frozen=True)
class PairwiseComparison:
    """One rank-sum comparison of clone frequencies between two languages."""

    language_a: str
    language_b: str
    result: stats.TestResult
    adjusted_p: float | None


@dataclass(frozen=True)
class ConnectionReport:
    """Connection profiles plus their summaries and paired tests."""

    profiles: tuple[connections.ConnectionProfile, ...]
    total_summary: stats.SummaryRow | None
    normalized_summary: stats.SummaryRow | None
    c0_vs_ic: stats.TestResult | None
    c0_vs_sc: stats.TestResult | None


@dataclass(frozen=True)
class CmwReport:
    """Whitespace-insensitive clone results over the whole corpus."""

    snippet_count: int
    empty_snippets: int
    unique_snippets: int
    cloned_snippets: int
    clone_groups: int
    clone_ratio: float
    self_clone_notebooks: int
    all_cloned_notebooks: int
    all_unique_notebooks: int
    notebook_clone_members: int
    notebook_clone_classes: int
    tables: CloneStatTables
    spearman_cells_frequency: stats.TestResult | None
    kruskal_language: stats.TestResult | None
    pairwise_language: tuple[PairwiseComparison, ...]
    connections: ConnectionReport


@dataclass(frozen=True)
class NearMissReport:
    """Token-bag clone results over one language's notebooks.

    Emptiness here means no source line survives comment stripping
    (sloc = 0), so comment-only snippets are excluded along with blank
    ones.
    """

    language: str
    notebook_count: int
    snippet_count: int
    empty_snippets: int
    analyzed_snippets: int
    cloned_snippets: int
    self_clone_notebooks: int
    all_cloned_notebooks: int
    all_unique_notebooks: int
    line_counts: stats.SummaryRow | None
    frequencies_percent: stats.SummaryRow | None
    spearman_cells_frequency: stats.TestResult | None
    connections: ConnectionReport
    pairs: tuple[tuple[ingest.SnippetRef, ingest.SnippetRef], ...]


@dataclass(frozen=True)
class TopClone:
    """One entry in the most-common-clones listing."""

    rank: int
    digest: str
    occurrences: int
    median_loc: int
    representative: str


@dataclass(frozen=True)
class ReportBundle:
    """Everything one pipeline run produces."""

    config: PipelineConfig
    manifest_path: str
    analyzed_notebooks: int
    parse_summary: dict[str, int]
    size_stats: ingest.SizeStats
    language_table: tuple[langid.LanguageRow, ...]
    language_conflicts: int
    cmw: CmwReport
    nearmiss: NearMissReport
    top_clones: tuple[TopClone, ...]
    figures: dict[str, tuple[tuple[str, ...], list[tuple]]]


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------


def _read_worker(args: tuple[str, ingest.ManifestEntry]) -> ingest.NotebookRecord:
    base_dir, entry = args
    return ingest.read_notebook(entry, base_dir)


def _read_records(
    base_dir: Path, entries: Sequence[ingest.ManifestEntry], workers: int
) -> list[ingest.NotebookRecord]:
    if workers <= 1 or len(entries) < 2:
        return [ingest.read_notebook(entry, base_dir) for entry in entries]
    # map() preserves input order, so the schedule cannot affect results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        args = ((str(base_dir), entry) for entry in entries)
        return list(pool.map(_read_worker, args, chunksize=16))


def _parse_summary(
    manifest: ingest.CorpusManifest,
    records: Sequence[ingest.NotebookRecord],
    analyzed: Sequence[ingest.NotebookRecord],
) -> dict[str, int]:
    counts = Counter(r.parse_status for r in records)
    return {
        "manifest_entries": len(manifest.entries),
        "fork_excluded": len(manifest.entries) - len(records),
        "not_json": counts.get(ingest.ParseStatus.NOT_JSON, 0),
        "ill_formed": counts.get(ingest.ParseStatus.ILL_FORMED, 0),
        "lfs_pointer": counts.get(ingest.ParseStatus.LFS_POINTER, 0),
        "cells_unreadable": counts.get(ingest.ParseStatus.CELLS_UNREADABLE, 0),
        "code_unreadable": counts.get(ingest.ParseStatus.CODE_UNREADABLE, 0),
        "ok": counts.get(ingest.ParseStatus.OK, 0),
        "analyzed": len(analyzed),
        "byte_identical_copies": len(analyzed)
        - len({r.content_digest for r in analyzed}),
    }


def _summary_or_none(values: Sequence[float]) -> stats.SummaryRow | None:
    return stats.summarize(values) if len(values) else None


def _connection_report(
    pairs: Iterable[tuple],
    records: Sequence[ingest.NotebookRecord],
    config: PipelineConfig,
) -> ConnectionReport:
    profiles = connections.build_connection_profiles(
        sorted(pairs),
        records,
        selfloop_mode=config.selfloop_mode,
        normalized_includes_empty=config.normalized_includes_empty,
    )
    if not profiles:
        return ConnectionReport((), None, None, None, None)
    c0_ic, c0_sc = connections.paired_connection_tests(profiles)
    return ConnectionReport(
        profiles=profiles,
        total_summary=stats.summarize([p.total for p in profiles]),
        normalized_summary=stats.summarize([p.normalized for p in profiles]),
        c0_vs_ic=c0_ic,
        c0_vs_sc=c0_sc,
    )


def _spearman_or_none(
    x: Sequence[float], y: Sequence[float]
) -> stats.TestResult | None:
    if len(x) < 3:
        return None
    return stats.spearman(x, y)


def _language_tests(
    frequencies_by_language: Mapping[langid.LanguageGroup, list[float]],
) -> tuple[stats.TestResult | None, tuple[PairwiseComparison, ...]]:
    present = [
        group
        for group in langid.REPORT_ORDER
        if group is not langid.LanguageGroup.UNDEFINED
        and frequencies_by_language.get(group)
    ]
    samples = [frequencies_by_language[g] for g in present]
    kruskal = None
    if len(present) >= 2 and sum(len(s) for s in samples) >= 3:
        kruskal = stats.kruskal_wallis(samples)
    comparisons = []
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            result = stats.wilcoxon_rank_sum(samples[i], samples[j])
            comparisons.append((present[i].value, present[j].value, result))
    raw = [c[2].p_value for c in comparisons if c[2].p_value is not None]
    adjusted = stats.hochberg_adjust(raw)
    adjusted_iter = iter(adjusted)
    pairwise = tuple(
        PairwiseComparison(
            language_a=a,
            language_b=b,
            result=result,
            adjusted_p=next(adjusted_iter) if result.p_value is not None else None,
        )
        for a, b, result in comparisons
    )
    return kruskal, pairwise


def _build_cmw_section(
    analyzed: Sequence[ingest.NotebookRecord],
    classifications: Mapping[str, langid.LanguageGroup],
    config: PipelineConfig,
) -> tuple[CmwReport, cmw.CloneGrouping, list[ingest.Snippet], dict[str, float]]:
    snippets = [s for r in analyzed for s in r.code_cells]
    grouping = cmw.build_clone_groups(
        snippets, include_empty=config.include_empty, algorithm=config.digest_algorithm
    )
    cloned_count = sum(
        g.occurrence_count for g in grouping.groups if g.occurrence_count >= 2
    )
    unique_count = sum(1 for g in grouping.groups if g.occurrence_count == 1)
    group_count = sum(1 for g in grouping.groups if g.occurrence_count >= 2)

    self_cloned: set[str] = set()
    for group in grouping.groups:
        if group.occurrence_count < 2:
            continue
        seen: set[str] = set()
        for notebook_id, _ in group.members:
            if notebook_id in seen:
                self_cloned.add(notebook_id)
            seen.add(notebook_id)

    frequency = {r.notebook_id: cmw.clone_frequency(r, grouping) for r in analyzed}
    nonempty = {
        r.notebook_id: sum(
            1 for s in r.code_cells if cmw.normalize_whitespace(s.text)
        )
        for r in analyzed
    }
    all_cloned = sum(
        1 for nb, f in frequency.items() if nonempty[nb] and f == 1.0
    )
    all_unique = sum(
        1 for nb, f in frequency.items() if nonempty[nb] and f == 0.0
    )

    classes = cmw.notebook_clone_classes(
        analyzed,
        include_empty=config.notebook_clones_include_empty,
        algorithm=config.digest_algorithm,
    )
    clone_classes = [c for c in classes if len(c.members) >= 2]

    clone_sizes = [
        g.median_loc
        for g in grouping.groups
        if g.occurrence_count >= 2
        for _ in range(g.occurrence_count)
    ]
    group_sizes = [
        g.occurrence_count for g in grouping.groups if g.occurrence_count >= 2
    ]
    tables = CloneStatTables(
        clone_sizes=_summary_or_none(clone_sizes),
        group_sizes=_summary_or_none(group_sizes),
        frequencies_percent=_summary_or_none(
            [100.0 * frequency[r.notebook_id] for r in analyzed]
        ),
    )

    by_language: dict[langid.LanguageGroup, list[float]] = {}
    for record in analyzed:
        group = classifications[record.notebook_id]
        by_language.setdefault(group, []).append(frequency[record.notebook_id])
    kruskal, pairwise = _language_tests(by_language)

    spearman = _spearman_or_none(
        [len(r.code_cells) for r in analyzed],
        [frequency[r.notebook_id] for r in analyzed],
    )

    pairs = list(cmw.pairs_from_groups(grouping.groups))
    connection_report = _connection_report(pairs, analyzed, config)

    report = CmwReport(
        snippet_count=grouping.snippet_count,
        empty_snippets=grouping.empty_count,
        unique_snippets=unique_count,
        cloned_snippets=cloned_count,
        clone_groups=group_count,
        clone_ratio=cmw.corpus_clone_ratio(grouping),
        self_clone_notebooks=len(self_cloned),
        all_cloned_notebooks=all_cloned,
        all_unique_notebooks=all_unique,
        notebook_clone_members=sum(len(c.members) for c in clone_classes),
        notebook_clone_classes=len(clone_classes),
        tables=tables,
        spearman_cells_frequency=spearman,
        kruskal_language=kruskal,
        pairwise_language=pairwise,
        connections=connection_report,
    )
    return report, grouping, snippets, frequency


def _build_nearmiss_section(
    analyzed: Sequence[ingest.NotebookRecord],
    classifications: Mapping[str, langid.LanguageGroup],
    config: PipelineConfig,
) -> tuple[NearMissReport, dict[str, float], list[int]]:
    target = langid.LanguageGroup[config.nearmiss_language]
    records = [r for r in analyzed if classifications[r.notebook_id] is target]
    snippets = [s for r in records for s in r.code_cells]
    eligible = [s for s in snippets if s.sloc >= 1]
    bags = {s.ref: nearmiss.snippet_bag(s.text) for s in eligible}
    pairs = nearmiss.detect_clone_pairs(bags, config.detector_config())
    status = nearmiss.clone_status(pairs, snippets)

    frequency = {r.notebook_id: status.notebook_frequency.get(r.notebook_id, 0.0)
                 for r in records}
    eligible_count: dict[str, int] = Counter(s.notebook_id for s in eligible)
    self_cloned = {a[0] for a, b in pairs if a[0] == b[0]}
    all_cloned = sum(
        1 for nb, f in frequency.items() if eligible_count.get(nb) and f == 1.0
    )
    all_unique = sum(
        1 for nb, f in frequency.items() if eligible_count.get(nb) and f == 0.0
    )
    cloned_slocs = [s.sloc for s in eligible if s.ref in status.cloned]

    report = NearMissReport(
        language=config.nearmiss_language,
        notebook_count=len(records),
        snippet_count=len(snippets),
        empty_snippets=len(snippets) - len(eligible),
        analyzed_snippets=len(eligible),
        cloned_snippets=len(status.cloned),
        self_clone_notebooks=len(self_cloned),
        all_cloned_notebooks=all_cloned,
        all_unique_notebooks=all_unique,
        line_counts=_summary_or_none(cloned_slocs),
        frequencies_percent=_summary_or_none(
            [100.0 * frequency[r.notebook_id] for r in records]
        ),
        spearman_cells_frequency=_spearman_or_none(
            [len(r.code_cells) for r in records],
            [frequency[r.notebook_id] for r in records],
        ),
        connections=_connection_report(pairs, records, config),
        pairs=tuple(sorted(pairs)),
    )
    return report, frequency, cloned_slocs


def top_clones(
    groups: Iterable[cmw.CloneGroup],
    snippets: Iterable[ingest.Snippet],
    n: int,
    min_loc: int = 0,
) -> tuple[TopClone, ...]:
    """The ``n`` most frequent clone groups, optionally at least ``min_loc`` lines.

    Only groups with two or more members qualify; ties in occurrence count
    are broken by digest. Each entry carries the original source of the
    group's first member as its representative.
    """
    if n <= 0:
        raise ValidationError("n must be positive")
    text_by_ref = {s.ref: s.text for s in snippets}
    ranked = sorted(
        (
            g
            for g in groups
            if g.occurrence_count >= 2 and g.median_loc >= min_loc
        ),
        key=lambda g: (-g.occurrence_count, g.digest),
    )
    return tuple(
        TopClone(
            rank=rank,
            digest=group.digest,
            occurrences=group.occurrence_count,
            median_loc=group.median_loc,
            representative=text_by_ref[group.members[0]],
        )
        for rank, group in enumerate(ranked[:n], start=1)
    )


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------


def _hist(values: Sequence[float], width: float) -> tuple[tuple[str, ...], list[tuple]]:
    return ("bin", "count"), stats.histogram(values, width=width)


def _scatter_rows(
    header: tuple[str, ...], rows: Iterable[tuple]
) -> tuple[tuple[str, ...], list[tuple]]:
    return header, sorted(rows)


def _figure_datasets(
    analyzed: Sequence[ingest.NotebookRecord],
    grouping: cmw.CloneGrouping,
    cmw_report: CmwReport,
    cmw_frequency: Mapping[str, float],
    nearmiss_report: NearMissReport,
    nearmiss_frequency: Mapping[str, float],
    nearmiss_cloned_slocs: Sequence[int],
    config: PipelineConfig,
) -> dict[str, tuple[tuple[str, ...], list[tuple]]]:
    classes = cmw.notebook_clone_classes(
        analyzed,
        include_empty=config.notebook_clones_include_empty,
        algorithm=config.digest_algorithm,
    )
    clone_groups = [g for g in grouping.groups if g.occurrence_count >= 2]
    nearmiss_ids = {p.notebook_id for p in nearmiss_report.connections.profiles}
    cells_by_id = {r.notebook_id: len(r.code_cells) for r in analyzed}

    figures: dict[str, tuple[tuple[str, ...], list[tuple]]] = {}
    figures["notebook_bytes_hist"] = _hist(
        [r.byte_size for r in analyzed], BYTES_BIN_WIDTH
    )
    figures["notebook_cells_hist"] = _hist(
        [len(r.code_cells) for r in analyzed], COUNT_BIN_WIDTH
    )
    figures["notebook_loc_nonblank_hist"] = _hist(
        [sum(s.loc_nonblank for s in r.code_cells) for r in analyzed],
        COUNT_BIN_WIDTH,
    )
    figures["notebook_loc_total_hist"] = _hist(
        [sum(s.loc_total for s in r.code_cells) for r in analyzed], COUNT_BIN_WIDTH
    )
    figures["cmw_group_occurrences_hist"] = _hist(
        [g.occurrence_count for g in clone_groups], COUNT_BIN_WIDTH
    )
    figures["notebook_clone_occurrences_hist"] = _hist(
        [len(c.members) for c in classes if len(c.members) >= 2], COUNT_BIN_WIDTH
    )
    figures["cmw_clone_size_hist"] = _hist(
        [
            g.median_loc
            for g in clone_groups
            for _ in range(g.occurrence_count)
        ],
        COUNT_BIN_WIDTH,
    )
    figures["cmw_group_size_hist"] = _hist(
        [g.median_loc for g in clone_groups], COUNT_BIN_WIDTH
    )
    figures["cmw_frequency_hist"] = _hist(
        [100.0 * cmw_frequency[r.notebook_id] for r in analyzed], PERCENT_BIN_WIDTH
    )
    figures["cmw_frequency_vs_cells"] = _scatter_rows(
        ("notebook_id", "code_cells", "frequency_percent"),
        (
            (nb, cells_by_id[nb], 100.0 * f)
            for nb, f in cmw_frequency.items()
        ),
    )
    profiles = cmw_report.connections.profiles
    figures["cmw_connections_hist"] = _hist(
        [p.total for p in profiles], COUNT_BIN_WIDTH
    )
    figures["cmw_normalized_connections_hist"] = _hist(
        [p.normalized for p in profiles], COUNT_BIN_WIDTH
    )
    figures["cmw_c0_vs_ic"] = _scatter_rows(
        ("notebook_id", "c0", "ic"), ((p.notebook_id, p.c0, p.ic) for p in profiles)
    )
    figures["cmw_c0_vs_sc"] = _scatter_rows(
        ("notebook_id", "c0", "sc"), ((p.notebook_id, p.c0, p.sc) for p in profiles)
    )

    figures["nearmiss_clone_size_hist"] = _hist(
        list(nearmiss_cloned_slocs), COUNT_BIN_WIDTH
    )
    figures["nearmiss_frequency_hist"] = _hist(
        [100.0 * f for f in nearmiss_frequency.values()], PERCENT_BIN_WIDTH
    )
    figures["nearmiss_frequency_vs_cells"] = _scatter_rows(
        ("notebook_id", "code_cells", "frequency_percent"),
        (
            (nb, cells_by_id[nb], 100.0 * f)
            for nb, f in nearmiss_frequency.items()
            if nb in nearmiss_ids
        ),
    )
    nm_profiles = nearmiss_report.connections.profiles
    figures["nearmiss_connections_hist"] = _hist(
        [p.total for p in nm_profiles], COUNT_BIN_WIDTH
    )
    figures["nearmiss_normalized_connections_hist"] = _hist(
        [p.normalized for p in nm_profiles], COUNT_BIN_WIDTH
    )
    figures["nearmiss_c0_vs_ic"] = _scatter_rows(
        ("notebook_id", "c0", "ic"),
        ((p.notebook_id, p.c0, p.ic) for p in nm_profiles),
    )
    figures["nearmiss_c0_vs_sc"] = _scatter_rows(
        ("notebook_id", "c0", "sc"),
        ((p.notebook_id, p.c0, p.sc) for p in nm_profiles),
    )
    return figures


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def run_pipeline(
    manifest_path: str | Path,
    config: PipelineConfig = PipelineConfig(),
    out_dir: str | Path | None = None,
) -> ReportBundle:
    """Run every analysis over the corpus behind ``manifest_path``.

    Fork-flagged notebooks never enter any statistic; notebooks whose
    parse failed outright are counted in the parse summary and excluded
    everywhere else. With ``out_dir`` set, all tables and figure datasets
    are also written there.
    """
    manifest = ingest.load_manifest(manifest_path)
    active = manifest.active_entries()
    if not active:
        raise ValidationError("corpus is empty after fork exclusion")
    records = _read_records(manifest.base_dir, active, config.workers)
    analyzed = [r for r in records if r.parse_status in ingest.ANALYZED_STATUSES]
    if not analyzed:
        raise ValidationError("no notebook in the corpus could be analyzed")

    classifications = {
        r.notebook_id: langid.classify_language(r.language_evidence)
        for r in analyzed
    }
    cmw_report, grouping, snippets, cmw_frequency = _build_cmw_section(
        analyzed, classifications, config
    )
    nearmiss_report, nearmiss_frequency, nearmiss_slocs = _build_nearmiss_section(
        analyzed, classifications, config
    )

    bundle = ReportBundle(
        config=config,
        manifest_path=str(manifest_path),
        analyzed_notebooks=len(analyzed),
        parse_summary=_parse_summary(manifest, records, analyzed),
        size_stats=ingest.summarize_corpus(analyzed),
        language_table=tuple(
            langid.language_distribution(classifications.values())
        ),
        language_conflicts=sum(
            1
            for r in analyzed
            if langid.detect_conflicts(r.language_evidence).has_conflict
        ),
        cmw=cmw_report,
        nearmiss=nearmiss_report,
        top_clones=top_clones(
            grouping.groups, snippets, config.top_n, config.min_loc
        ),
        figures=_figure_datasets(
            analyzed,
            grouping,
            cmw_report,
            cmw_frequency,
            nearmiss_report,
            nearmiss_frequency,
            nearmiss_slocs,
            config,
        ),
    )
    if out_dir is not None:
        write_bundle(bundle, out_dir)
    return bundle


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_SUMMARY_HEADER = ("metric", "min", "p10", "p25", "median", "mean", "p75", "p90", "max")


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])
    os.replace(tmp, path)


def _write_json(path: Path, document: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(document, sort_keys=True, indent=2) + "\n")
    os.replace(tmp, path)


def _summary_rows(
    named: Iterable[tuple[str, stats.SummaryRow | None]]
) -> list[tuple]:
    rows = []
    for name, summary in named:
        if summary is None:
            continue
        rows.append((name, *[value for _, value in summary.as_ordered_pairs()]))
    return rows


def _test_rows(named: Iterable[tuple[str, stats.TestResult | None]]) -> list[tuple]:
    rows = []
    for name, result in named:
        if result is None:
            continue
        rows.append(
            (
                name,
                result.statistic_name,
                result.statistic,
                result.p_value,
                stats.format_p(result.p_value),
                "|".join(str(n) for n in result.sample_sizes),
                result.notes,
            )
        )
    return rows


def _profile_rows(report: ConnectionReport) -> list[tuple]:
    return [
        (p.notebook_id, p.total, p.normalized, p.c0, p.ic, p.sc)
        for p in report.profiles
    ]


def _percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


def _write_run_manifest(bundle: ReportBundle, out: Path) -> list[Path]:
    config_doc = dataclasses.asdict(bundle.config)
    config_doc.pop("workers")
    path = out / "run_manifest.json"
    _write_json(path, {"manifest_path": bundle.manifest_path, "config": config_doc})
    return [path]


def _write_parse_summary(bundle: ReportBundle, out: Path) -> list[Path]:
    rows = list(bundle.parse_summary.items())
    rows.append(("language_conflicts", bundle.language_conflicts))
    path = out / "parse_summary.csv"
    _write_csv(path, ("key", "value"), rows)
    return [path]


def _write_size_stats(bundle: ReportBundle, out: Path) -> list[Path]:
    path = out / "size_stats.csv"
    _write_csv(path, _SUMMARY_HEADER, _summary_rows(bundle.size_stats.as_ordered_pairs()))
    return [path]


def _write_language_distribution(bundle: ReportBundle, out: Path) -> list[Path]:
    path = out / "language_distribution.csv"
    _write_csv(
        path,
        ("language", "notebooks", "percent"),
        [(row.language, row.count, row.percent) for row in bundle.language_table],
    )
    return [path]


def _write_cmw_tables(bundle: ReportBundle, out: Path) -> list[Path]:
    c = bundle.cmw
    n_analyzed = bundle.analyzed_notebooks
    summary_path = out / "cmw_summary.csv"
    _write_csv(
        summary_path,
        ("key", "value"),
        [
            ("analyzed_notebooks", n_analyzed),
            ("snippet_count", c.snippet_count),
            ("empty_snippets", c.empty_snippets),
            ("unique_snippets", c.unique_snippets),
            ("cloned_snippets", c.cloned_snippets),
            ("clone_groups", c.clone_groups),
            ("clone_ratio_percent", 100.0 * c.clone_ratio),
            ("self_clone_notebooks", c.self_clone_notebooks),
            ("self_clone_notebooks_percent", _percent(c.self_clone_notebooks, n_analyzed)),
            ("all_cloned_notebooks", c.all_cloned_notebooks),
            ("all_cloned_notebooks_percent", _percent(c.all_cloned_notebooks, n_analyzed)),
            ("all_unique_notebooks", c.all_unique_notebooks),
            ("all_unique_notebooks_percent", _percent(c.all_unique_notebooks, n_analyzed)),
            ("notebook_clone_members", c.notebook_clone_members),
            ("notebook_clone_classes", c.notebook_clone_classes),
        ],
    )
    stats_path = out / "cmw_stats.csv"
    _write_csv(
        stats_path,
        _SUMMARY_HEADER,
        _summary_rows(
            [
                ("clone_sizes", c.tables.clone_sizes),
                ("group_sizes", c.tables.group_sizes),
                ("frequency_percent", c.tables.frequencies_percent),
            ]
        ),
    )
    return [summary_path, stats_path]


def _write_stat_tests(bundle: ReportBundle, out: Path) -> list[Path]:
    c = bundle.cmw
    nm = bundle.nearmiss
    tests_path = out / "tests.csv"
    _write_csv(
        tests_path,
        ("analysis", "statistic", "value", "p_value", "p_display", "samples", "notes"),
        _test_rows(
            [
                ("cmw_spearman_cells_frequency", c.spearman_cells_frequency),
                ("cmw_kruskal_language", c.kruskal_language),
                ("cmw_c0_vs_ic", c.connections.c0_vs_ic),
                ("cmw_c0_vs_sc", c.connections.c0_vs_sc),
                ("nearmiss_spearman_cells_frequency", nm.spearman_cells_frequency),
                ("nearmiss_c0_vs_ic", nm.connections.c0_vs_ic),
                ("nearmiss_c0_vs_sc", nm.connections.c0_vs_sc),
            ]
        ),
    )
    pairwise_path = out / "pairwise_language.csv"
    _write_csv(
        pairwise_path,
        (
            "language_a",
            "language_b",
            "statistic_w",
            "p_raw",
            "p_adjusted",
            "p_adjusted_display",
            "notes",
        ),
        [
            (
                entry.language_a,
                entry.language_b,
                entry.result.statistic,
                entry.result.p_value,
                entry.adjusted_p,
                stats.format_p(entry.adjusted_p),
                entry.result.notes,
            )
            for entry in c.pairwise_language
        ],
    )
    return [tests_path, pairwise_path]


def _write_cmw_connections(bundle: ReportBundle, out: Path) -> list[Path]:
    c = bundle.cmw
    summary_path = out / "cmw_connections.csv"
    _write_csv(
        summary_path,
        _SUMMARY_HEADER,
        _summary_rows(
            [
                ("total", c.connections.total_summary),
                ("normalized", c.connections.normalized_summary),
            ]
        ),
    )
    profiles_path = out / "cmw_profiles.csv"
    _write_csv(
        profiles_path,
        ("notebook_id", "total", "normalized", "c0", "ic", "sc"),
        _profile_rows(c.connections),
    )
    return [summary_path, profiles_path]


def _write_nearmiss_tables(bundle: ReportBundle, out: Path) -> list[Path]:
    nm = bundle.nearmiss
    summary_path = out / "nearmiss_summary.csv"
    _write_csv(
        summary_path,
        ("key", "value"),
        [
            ("language", nm.language),
            ("notebook_count", nm.notebook_count),
            ("snippet_count", nm.snippet_count),
            ("empty_snippets", nm.empty_snippets),
            ("empty_snippets_percent", _percent(nm.empty_snippets, nm.snippet_count)),
            ("analyzed_snippets", nm.analyzed_snippets),
            ("cloned_snippets", nm.cloned_snippets),
            ("cloned_snippets_percent", _percent(nm.cloned_snippets, nm.analyzed_snippets)),
            ("self_clone_notebooks", nm.self_clone_notebooks),
            ("self_clone_notebooks_percent", _percent(nm.self_clone_notebooks, nm.notebook_count)),
            ("all_cloned_notebooks", nm.all_cloned_notebooks),
            ("all_cloned_notebooks_percent", _percent(nm.all_cloned_notebooks, nm.notebook_count)),
            ("all_unique_notebooks", nm.all_unique_notebooks),
            ("all_unique_notebooks_percent", _percent(nm.all_unique_notebooks, nm.notebook_count)),
        ],
    )
    stats_path = out / "nearmiss_stats.csv"
    _write_csv(
        stats_path,
        _SUMMARY_HEADER,
        _summary_rows(
            [
                ("line_counts", nm.line_counts),
                ("frequency_percent", nm.frequencies_percent),
            ]
        ),
    )
    pairs_path = out / "nearmiss_pairs.csv"
    _write_csv(
        pairs_path,
        ("notebook_id_a", "cell_a", "notebook_id_b", "cell_b"),
        [(a[0], a[1], b[0], b[1]) for a, b in nm.pairs],
    )
    return [summary_path, stats_path, pairs_path]


def _write_nearmiss_connections(bundle: ReportBundle, out: Path) -> list[Path]:
    nm = bundle.nearmiss
    summary_path = out / "nearmiss_connections.csv"
    _write_csv(
        summary_path,
        _SUMMARY_HEADER,
        _summary_rows(
            [
                ("total", nm.connections.total_summary),
                ("normalized", nm.connections.normalized_summary),
            ]
        ),
    )
    profiles_path = out / "nearmiss_profiles.csv"
    _write_csv(
        profiles_path,
        ("notebook_id", "total", "normalized", "c0", "ic", "sc"),
        _profile_rows(nm.connections),
    )
    return [summary_path, profiles_path]


def _write_top_clones(bundle: ReportBundle, out: Path) -> list[Path]:
    path = out / "top_clones.csv"
    _write_csv(
        path,
        ("rank", "occurrences", "median_loc", "digest", "representative"),
        [
            (t.rank, t.occurrences, t.median_loc, t.digest, t.representative)
            for t in bundle.top_clones
        ],
    )
    return [path]


def _write_figures(bundle: ReportBundle, out: Path) -> list[Path]:
    figures_dir = out / "figures"
    figures_dir.mkdir(exist_ok=True)
    written = []
    for name, (header, rows) in sorted(bundle.figures.items()):
        path = figures_dir / f"{name}.csv"
        _write_csv(path, header, rows)
        written.append(path)
    return written


#: Artifact sections, in the order the full bundle writes them.
SECTION_WRITERS = {
    "run-manifest": _write_run_manifest,
    "parse": _write_parse_summary,
    "sizes": _write_size_stats,
    "languages": _write_language_distribution,
    "cmw": _write_cmw_tables,
    "tests": _write_stat_tests,
    "cmw-connections": _write_cmw_connections,
    "nearmiss": _write_nearmiss_tables,
    "nearmiss-connections": _write_nearmiss_connections,
    "top-clones": _write_top_clones,
    "figures": _write_figures,
}


def write_artifacts(
    bundle: ReportBundle, out_dir: str | Path, sections: Iterable[str]
) -> list[Path]:
    """Write the named artifact sections of ``bundle`` under ``out_dir``.

    Files are written to a temporary name and renamed into place, so a
    crash cannot leave a truncated file at a final path. Returns the
    written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for section in sections:
        if section not in SECTION_WRITERS:
            raise ValidationError(f"unknown artifact section {section!r}")
        written.extend(SECTION_WRITERS[section](bundle, out))
    return written


def write_bundle(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Write every table and figure dataset of ``bundle`` under ``out_dir``."""
    return write_artifacts(bundle, out_dir, SECTION_WRITERS)
