"""Language classification from notebook metadata.

A notebook declares its language in up to four places, consulted in
priority order: ``metadata.language_info.name``, ``metadata.language``,
``metadata.kernelspec.language``, and finally a per-code-cell language
field. The first field that carries a value decides; the per-cell route
only counts when every code cell declares the same value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from nbclones.ingest import LanguageEvidence


class LanguageGroup(enum.Enum):
    JULIA = "JULIA"
    PYTHON = "PYTHON"
    R = "R"
    SCALA = "SCALA"
    OTHER = "OTHER"
    UNDEFINED = "UNDEFINED"


#: Order used for report rows and pairwise test matrices.
REPORT_ORDER = (
    LanguageGroup.PYTHON,
    LanguageGroup.JULIA,
    LanguageGroup.R,
    LanguageGroup.SCALA,
    LanguageGroup.OTHER,
    LanguageGroup.UNDEFINED,
)


def match_language(value: str) -> LanguageGroup:
    """Map one declared value to its language group.

    Matching is case-sensitive over the two spellings seen in practice:
    Julia and R match exactly, Python and Scala match as prefixes (their
    declarations usually carry a version suffix). Values are trimmed first.
    """
    value = value.strip()
    if value in ("Julia", "julia"):
        return LanguageGroup.JULIA
    if value.startswith(("Python", "python")):
        return LanguageGroup.PYTHON
    if value in ("R", "r"):
        return LanguageGroup.R
    if value.startswith(("Scala", "scala")):
        return LanguageGroup.SCALA
    return LanguageGroup.OTHER


def _present(value: str | None) -> str | None:
    if value is None:
        return None
    value = value.strip()
    return value or None


def _agreed_cell_value(evidence: LanguageEvidence) -> str | None:
    """The single value all code cells declare, if there is one."""
    if not evidence.cell_languages:
        return None
    values = [_present(v) for v in evidence.cell_languages]
    if any(v is None for v in values):
        return None
    distinct = set(values)
    if len(distinct) != 1:
        return None
    return values[0]


def classify_language(evidence: LanguageEvidence) -> LanguageGroup:
    """Classify a notebook; UNDEFINED iff no field carries a usable value."""
    for value in (
        _present(evidence.info_name),
        _present(evidence.notebook_language),
        _present(evidence.kernel_language),
    ):
        if value is not None:
            return match_language(value)
    cell_value = _agreed_cell_value(evidence)
    if cell_value is not None:
        return match_language(cell_value)
    return LanguageGroup.UNDEFINED


@dataclass(frozen=True)
class ConflictReport:
    """Whether a notebook's declarations disagree, and how."""

    has_conflict: bool
    groups: tuple[LanguageGroup, ...]


def detect_conflicts(evidence: LanguageEvidence) -> ConflictReport:
    """Flag notebooks whose declarations map to different language groups.

    All present values are considered, including individually present cell
    values, so cells that disagree among themselves also conflict.
    """
    groups: set[LanguageGroup] = set()
    for value in (
        evidence.info_name,
        evidence.notebook_language,
        evidence.kernel_language,
        *evidence.cell_languages,
    ):
        present = _present(value)
        if present is not None:
            groups.add(match_language(present))
    if len(groups) < 2:
        return ConflictReport(False, ())
    return ConflictReport(True, tuple(sorted(groups, key=lambda g: g.value)))


@dataclass(frozen=True)
class LanguageRow:
    language: str
    count: int
    percent: float


def language_distribution(
    classifications: Iterable[LanguageGroup],
) -> list[LanguageRow]:
    """Counts and percentages per language group, largest group first.

    Groups with zero notebooks are omitted; an empty corpus gives an empty
    table.
    """
    counts: dict[LanguageGroup, int] = {}
    total = 0
    for group in classifications:
        counts[group] = counts.get(group, 0) + 1
        total += 1
    if total == 0:
        return []
    rows = [
        LanguageRow(group.value, count, 100.0 * count / total)
        for group, count in counts.items()
    ]
    rows.sort(key=lambda row: (-row.count, row.language))
    return rows
