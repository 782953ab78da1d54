"""Tests for language classification from notebook metadata."""

from __future__ import annotations

import pytest

from nbclones import langid
from nbclones.ingest import LanguageEvidence
from nbclones.langid import LanguageGroup


def evidence(info=None, lang=None, kernel=None, cells=()):
    return LanguageEvidence(info, lang, kernel, tuple(cells))


# ---------------------------------------------------------------------------
# single-value matching
# ---------------------------------------------------------------------------


class TestMatchLanguage:
    @pytest.mark.parametrize("value", ["Julia", "julia"])
    def test_julia_exact(self, value):
        assert langid.match_language(value) is LanguageGroup.JULIA

    def test_julia_needs_exact_match(self):
        assert langid.match_language("julia-1.0") is LanguageGroup.OTHER

    @pytest.mark.parametrize("value", ["Python", "python", "Python 3", "python2"])
    def test_python_prefix(self, value):
        assert langid.match_language(value) is LanguageGroup.PYTHON

    def test_python_casing_is_significant(self):
        assert langid.match_language("PYTHON") is LanguageGroup.OTHER

    @pytest.mark.parametrize("value", ["R", "r"])
    def test_r_exact(self, value):
        assert langid.match_language(value) is LanguageGroup.R

    def test_r_prefix_does_not_match(self):
        assert langid.match_language("ruby") is LanguageGroup.OTHER

    @pytest.mark.parametrize("value", ["Scala", "scala 2.11"])
    def test_scala_prefix(self, value):
        assert langid.match_language(value) is LanguageGroup.SCALA

    def test_other(self):
        assert langid.match_language("C++") is LanguageGroup.OTHER

    def test_values_are_trimmed(self):
        assert langid.match_language("  python \t") is LanguageGroup.PYTHON


# ---------------------------------------------------------------------------
# classification priority
# ---------------------------------------------------------------------------


class TestClassify:
    def test_info_name_wins(self):
        ev = evidence(info="python", lang="R", kernel="julia", cells=["Scala"])
        assert langid.classify_language(ev) is LanguageGroup.PYTHON

    def test_second_field_when_first_absent(self):
        ev = evidence(lang="R", kernel="python")
        assert langid.classify_language(ev) is LanguageGroup.R

    def test_third_field_when_first_two_absent(self):
        assert langid.classify_language(evidence(kernel="julia")) is LanguageGroup.JULIA

    def test_whitespace_only_field_is_absent(self):
        ev = evidence(info="  ", lang="python")
        assert langid.classify_language(ev) is LanguageGroup.PYTHON

    def test_first_field_wins_even_when_it_maps_to_other(self):
        ev = evidence(info="C++", kernel="python")
        assert langid.classify_language(ev) is LanguageGroup.OTHER

    def test_cells_used_when_no_metadata_field(self):
        ev = evidence(cells=["python", "python", "python"])
        assert langid.classify_language(ev) is LanguageGroup.PYTHON

    def test_agreement_is_checked_on_trimmed_values(self):
        ev = evidence(cells=["python", " python "])
        assert langid.classify_language(ev) is LanguageGroup.PYTHON

    def test_disagreeing_cells_mean_no_language(self):
        ev = evidence(cells=["python", "R"])
        assert langid.classify_language(ev) is LanguageGroup.UNDEFINED

    def test_partially_declared_cells_mean_no_language(self):
        ev = evidence(cells=["python", None])
        assert langid.classify_language(ev) is LanguageGroup.UNDEFINED

    def test_no_evidence_at_all(self):
        assert langid.classify_language(evidence()) is LanguageGroup.UNDEFINED

    def test_no_cells_and_no_fields(self):
        assert langid.classify_language(evidence(cells=[])) is LanguageGroup.UNDEFINED


# ---------------------------------------------------------------------------
# conflicts
# ---------------------------------------------------------------------------


class TestDetectConflicts:
    def test_same_group_in_two_fields_is_not_a_conflict(self):
        report = langid.detect_conflicts(evidence(info="Python 3", kernel="python"))
        assert not report.has_conflict
        assert report.groups == ()

    def test_different_groups_conflict(self):
        report = langid.detect_conflicts(evidence(info="python", kernel="R"))
        assert report.has_conflict
        assert set(report.groups) == {LanguageGroup.PYTHON, LanguageGroup.R}

    def test_cells_participate_as_evidence(self):
        report = langid.detect_conflicts(evidence(info="python", cells=["R", "R"]))
        assert report.has_conflict

    def test_internally_disagreeing_cells_conflict(self):
        report = langid.detect_conflicts(evidence(cells=["python", "R"]))
        assert report.has_conflict
        assert set(report.groups) == {LanguageGroup.PYTHON, LanguageGroup.R}

    def test_no_values_no_conflict(self):
        assert not langid.detect_conflicts(evidence()).has_conflict

    def test_single_field_no_conflict(self):
        assert not langid.detect_conflicts(evidence(lang="julia")).has_conflict

    def test_groups_reported_deterministically(self):
        r1 = langid.detect_conflicts(evidence(info="python", kernel="R"))
        r2 = langid.detect_conflicts(evidence(info="R", kernel="python"))
        assert r1.groups == r2.groups


# ---------------------------------------------------------------------------
# distribution
# ---------------------------------------------------------------------------


class TestLanguageDistribution:
    def test_counts_and_percentages(self):
        rows = langid.language_distribution(
            [LanguageGroup.PYTHON] * 3 + [LanguageGroup.UNDEFINED]
        )
        assert rows[0].language == "PYTHON"
        assert rows[0].count == 3
        assert rows[0].percent == pytest.approx(75.0)
        assert rows[1].language == "UNDEFINED"
        assert rows[1].percent == pytest.approx(25.0)

    def test_sorted_by_count_then_name(self):
        rows = langid.language_distribution(
            [LanguageGroup.R, LanguageGroup.JULIA, LanguageGroup.PYTHON, LanguageGroup.JULIA]
        )
        assert [r.language for r in rows] == ["JULIA", "PYTHON", "R"]

    def test_percent_sums_to_one_hundred(self):
        rows = langid.language_distribution(
            [LanguageGroup.PYTHON, LanguageGroup.R, LanguageGroup.SCALA]
        )
        assert sum(r.percent for r in rows) == pytest.approx(100.0)

    def test_empty_corpus_gives_empty_table(self):
        assert langid.language_distribution([]) == []
