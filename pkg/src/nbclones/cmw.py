"""Exact clone detection that ignores all whitespace.

Two snippets count as clones when their sources are identical after every
Unicode whitespace character is deleted; comments are compared like any
other text.  Equality is decided through digests of the normalized text,
so grouping a corpus is a single hash pass.  The same digests, taken per
cell in notebook order, decide whether whole notebooks are clones of each
other.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError
from .ingest import NotebookRecord, Snippet, SnippetRef

__all__ = [
    "normalize_whitespace",
    "cmw_digest",
    "CloneGroup",
    "CloneGrouping",
    "build_clone_groups",
    "group_median_loc",
    "pairs_from_groups",
    "clone_frequency",
    "corpus_clone_ratio",
    "NotebookCloneClass",
    "notebook_clone_classes",
]

DEFAULT_ALGORITHM = "md5"


def normalize_whitespace(text: str) -> str:
    """Delete every Unicode whitespace character from ``text``."""
    return "".join(ch for ch in text if not ch.isspace())


def cmw_digest(text: str, algorithm: str = DEFAULT_ALGORITHM) -> str:
    """Hex digest of the whitespace-normalized text."""
    normalized = normalize_whitespace(text)
    return hashlib.new(algorithm, normalized.encode("utf-8")).hexdigest()


def group_median_loc(loc_values: Sequence[int]) -> int:
    """Median line count of a group, rounding halves down to whole lines."""
    if not loc_values:
        raise ValidationError("median of an empty group is undefined")
    ordered = sorted(loc_values)
    mid, odd = divmod(len(ordered), 2)
    if odd:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) // 2


@dataclass(frozen=True)
class CloneGroup:
    """All snippets sharing one normalized-text digest."""

    digest: str
    members: tuple[SnippetRef, ...]
    median_loc: int

    @property
    def occurrence_count(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CloneGrouping:
    """Digest partition of a snippet corpus.

    ``groups`` is ordered by occurrence count (descending) and digest;
    ``snippet_count`` counts every snippet offered, ``empty_count`` the
    ones whose normalized text was empty.  Empty snippets sit outside
    the groups unless grouping was asked to include them.
    """

    groups: tuple[CloneGroup, ...]
    snippet_count: int
    empty_count: int

    @cached_property
    def cloned_refs(self) -> frozenset[SnippetRef]:
        """Refs of snippets that belong to a group of two or more."""
        return frozenset(
            ref
            for group in self.groups
            if group.occurrence_count >= 2
            for ref in group.members
        )


def build_clone_groups(
    snippets: Iterable[Snippet],
    include_empty: bool = False,
    algorithm: str = DEFAULT_ALGORITHM,
) -> CloneGrouping:
    """Partition snippets into exact-clone groups by normalized-text digest.

    Snippets that are empty after whitespace removal are only counted, not
    grouped, unless ``include_empty`` is set.
    """
    members: dict[str, list[tuple[SnippetRef, int]]] = {}
    snippet_count = 0
    empty_count = 0
    for snippet in snippets:
        snippet_count += 1
        normalized = normalize_whitespace(snippet.text)
        if not normalized:
            empty_count += 1
            if not include_empty:
                continue
        digest = hashlib.new(algorithm, normalized.encode("utf-8")).hexdigest()
        members.setdefault(digest, []).append((snippet.ref, snippet.loc_nonblank))
    groups = []
    for digest, entries in members.items():
        entries.sort()
        groups.append(
            CloneGroup(
                digest=digest,
                members=tuple(ref for ref, _ in entries),
                median_loc=group_median_loc([loc for _, loc in entries]),
            )
        )
    groups.sort(key=lambda g: (-g.occurrence_count, g.digest))
    return CloneGrouping(tuple(groups), snippet_count, empty_count)


def pairs_from_groups(
    groups: Iterable[CloneGroup],
) -> Iterator[tuple[SnippetRef, SnippetRef]]:
    """Expand each group into its unordered member pairs."""
    for group in groups:
        members = group.members
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                yield members[i], members[j]


def clone_frequency(record: NotebookRecord, grouping: CloneGrouping) -> float:
    """Fraction of a notebook's non-empty snippets that are cloned somewhere.

    Empty snippets never enter the numerator or the denominator; a notebook
    with no non-empty snippets scores 0.0.
    """
    nonempty = [s for s in record.code_cells if normalize_whitespace(s.text)]
    if not nonempty:
        return 0.0
    cloned = grouping.cloned_refs
    return sum(1 for s in nonempty if s.ref in cloned) / len(nonempty)


def corpus_clone_ratio(grouping: CloneGrouping) -> float:
    """Fraction of grouped snippets that sit in a group of two or more."""
    total = sum(g.occurrence_count for g in grouping.groups)
    if total == 0:
        raise ValidationError("clone ratio of an empty corpus is undefined")
    cloned = sum(
        g.occurrence_count for g in grouping.groups if g.occurrence_count >= 2
    )
    return cloned / total


@dataclass(frozen=True)
class NotebookCloneClass:
    """Notebooks whose cell digest sequences are identical."""

    members: tuple[str, ...]
    cell_count: int


def notebook_clone_classes(
    records: Iterable[NotebookRecord],
    include_empty: bool = True,
    algorithm: str = DEFAULT_ALGORITHM,
) -> tuple[NotebookCloneClass, ...]:
    """Group notebooks that agree cell-for-cell on snippet digests.

    Two notebooks are clones when they have the same number of snippets and
    the digests match at every position.  Empty snippets take part in the
    comparison unless ``include_empty`` is cleared, in which case they are
    dropped before positions are compared.
    """
    by_key: dict[tuple[str, ...], list[str]] = {}
    for record in records:
        digests = []
        for snippet in record.code_cells:
            normalized = normalize_whitespace(snippet.text)
            if not normalized and not include_empty:
                continue
            digests.append(
                hashlib.new(algorithm, normalized.encode("utf-8")).hexdigest()
            )
        by_key.setdefault(tuple(digests), []).append(record.notebook_id)
    classes = [
        NotebookCloneClass(members=tuple(sorted(ids)), cell_count=len(key))
        for key, ids in by_key.items()
    ]
    classes.sort(key=lambda c: (-len(c.members), c.members))
    return tuple(classes)
