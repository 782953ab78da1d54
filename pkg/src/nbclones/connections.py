"""Connection multigraph over notebooks induced by clone pairs.

Every clone pair adds one edge between the notebooks that contain the two
snippets; multi-edges accumulate and a pair inside a single notebook forms
a self-loop.  Per notebook the edges split into intra-repository
connections (c0) and per-external-repository counts, whose mean and sum
are the ic and sc figures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import stats
from .cmw import normalize_whitespace
from .errors import ValidationError
from .ingest import NotebookRecord, SnippetRef

__all__ = [
    "ConnectionProfile",
    "build_connection_profiles",
    "paired_connection_tests",
    "SELFLOOP_MODES",
]

# "single" counts a self-loop as one incident edge; "degree" as two.
SELFLOOP_MODES = ("single", "degree")


@dataclass(frozen=True)
class ConnectionProfile:
    """Connection counts for one notebook.

    ``per_repo`` maps external repositories to their edge counts; it never
    names the notebook's own repository and never holds zeros, so
    ``c0 + sc == total`` and ``ic`` is the mean of its values (0.0 when
    empty).
    """

    notebook_id: str
    total: int
    normalized: float
    c0: int
    per_repo: Mapping[str, int]
    ic: float
    sc: int


def build_connection_profiles(
    pairs: Iterable[tuple[SnippetRef, SnippetRef]],
    records: Iterable[NotebookRecord],
    selfloop_mode: str = "single",
    normalized_includes_empty: bool = True,
) -> tuple[ConnectionProfile, ...]:
    """Accumulate clone-pair edges into one profile per notebook.

    Every record receives a profile (all-zero when untouched), in record
    order. ``normalized`` divides the total by the notebook's snippet
    count; clearing ``normalized_includes_empty`` drops whitespace-empty
    snippets from that denominator.
    """
    if selfloop_mode not in SELFLOOP_MODES:
        raise ValidationError(
            f"selfloop_mode must be one of {SELFLOOP_MODES}, got {selfloop_mode!r}"
        )
    records = list(records)
    repo_of = {r.notebook_id: r.repo_id for r in records}
    total: dict[str, int] = {}
    c0: dict[str, int] = {}
    per_repo: dict[str, dict[str, int]] = {}

    def check(ref: SnippetRef) -> str:
        notebook_id = ref[0]
        if notebook_id not in repo_of:
            raise ValidationError(f"pair references unknown notebook {notebook_id!r}")
        return notebook_id

    for left, right in pairs:
        nb_left = check(left)
        nb_right = check(right)
        if nb_left == nb_right:
            weight = 1 if selfloop_mode == "single" else 2
            total[nb_left] = total.get(nb_left, 0) + weight
            c0[nb_left] = c0.get(nb_left, 0) + weight
            continue
        for here, there in ((nb_left, nb_right), (nb_right, nb_left)):
            total[here] = total.get(here, 0) + 1
            other_repo = repo_of[there]
            if other_repo == repo_of[here]:
                c0[here] = c0.get(here, 0) + 1
            else:
                counts = per_repo.setdefault(here, {})
                counts[other_repo] = counts.get(other_repo, 0) + 1

    profiles = []
    for record in records:
        nb = record.notebook_id
        if normalized_includes_empty:
            denominator = len(record.code_cells)
        else:
            denominator = sum(
                1 for s in record.code_cells if normalize_whitespace(s.text)
            )
        nb_total = total.get(nb, 0)
        external = per_repo.get(nb, {})
        sc = sum(external.values())
        profiles.append(
            ConnectionProfile(
                notebook_id=nb,
                total=nb_total,
                normalized=nb_total / denominator if denominator else 0.0,
                c0=c0.get(nb, 0),
                per_repo=dict(sorted(external.items())),
                ic=sc / len(external) if external else 0.0,
                sc=sc,
            )
        )
    return tuple(profiles)


def paired_connection_tests(
    profiles: Iterable[ConnectionProfile],
) -> tuple[stats.TestResult, stats.TestResult]:
    """Signed-rank tests of c0 against ic and c0 against sc, paired per notebook."""
    profiles = list(profiles)
    c0_values = [float(p.c0) for p in profiles]
    ic_values = [p.ic for p in profiles]
    sc_values = [float(p.sc) for p in profiles]
    return (
        stats.wilcoxon_signed_rank(c0_values, ic_values),
        stats.wilcoxon_signed_rank(c0_values, sc_values),
    )
