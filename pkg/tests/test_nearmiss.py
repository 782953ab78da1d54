"""Tests for comment stripping, tokenization and near-miss pair detection."""

from __future__ import annotations

import json
import logging
import random
from collections import Counter, namedtuple

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbclones import nearmiss
from nbclones.errors import ValidationError


# ---------------------------------------------------------------------------
# strip_comments
# ---------------------------------------------------------------------------


class TestStripComments:
    def test_inline_comment_removed_to_end_of_line(self):
        assert nearmiss.strip_comments("x=1 # note") == "x=1 "

    def test_one_line_block_removed(self):
        assert nearmiss.strip_comments('"""doc"""\nx=1') == "\nx=1"

    def test_block_spanning_lines_keeps_line_structure(self):
        assert nearmiss.strip_comments('a\n"""\nb\n"""\nc') == "a\n\n\n\nc"

    def test_code_after_block_close_is_kept(self):
        assert nearmiss.strip_comments('"""c""" x=1') == " x=1"

    def test_single_quote_triple_is_not_a_comment(self):
        assert nearmiss.strip_comments("y='''s'''") == "y='''s'''"

    def test_hash_inside_string_still_starts_a_comment(self):
        # token-level rule: a hash always opens a comment, even in a literal
        assert nearmiss.strip_comments('print("a # b")') == 'print("a '

    def test_hash_inside_block_comment_is_inert(self):
        assert nearmiss.strip_comments('"""\n# not code\n"""\nx=1') == "\n\n\nx=1"

    def test_block_marker_after_hash_does_not_open_block(self):
        assert nearmiss.strip_comments('# """\nx=1') == "\nx=1"

    def test_unterminated_block_strips_to_end_and_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="nbclones.nearmiss"):
            out = nearmiss.strip_comments('x=1\n"""open\ny=2')
        assert out == "x=1\n\n"
        assert any("unterminated" in r.message for r in caplog.records)

    def test_empty_source(self):
        assert nearmiss.strip_comments("") == ""


# ---------------------------------------------------------------------------
# tokenize
# ---------------------------------------------------------------------------


class TestTokenize:
    def test_magic_line(self):
        assert nearmiss.tokenize("%matplotlib inline") == Counter(
            {"matplotlib": 1, "inline": 1}
        )

    def test_assignment(self):
        assert nearmiss.tokenize("x=1") == Counter({"x": 1, "1": 1})

    def test_underscore_is_not_a_separator(self):
        assert nearmiss.tokenize("my_var = foo_bar") == Counter(
            {"my_var": 1, "foo_bar": 1}
        )

    def test_repeated_tokens_are_counted(self):
        assert nearmiss.tokenize("a a a") == Counter({"a": 3})

    def test_every_separator_char_splits(self):
        seps = ";.[]()~!-+&*/%<>^|?{}=#,\"\\:$'`@"
        for ch in seps:
            assert nearmiss.tokenize(f"aa{ch}bb") == Counter({"aa": 1, "bb": 1}), ch

    def test_whitespace_separates(self):
        assert nearmiss.tokenize("aa\tbb\ncc dd") == Counter(
            {"aa": 1, "bb": 1, "cc": 1, "dd": 1}
        )

    def test_empty_and_separator_only_sources(self):
        assert nearmiss.tokenize("") == Counter()
        assert nearmiss.tokenize("()[]{}") == Counter()

    def test_snippet_bag_strips_comments_first(self):
        assert nearmiss.snippet_bag("x=1 # a comment full of words") == Counter(
            {"x": 1, "1": 1}
        )

    def test_comment_only_snippet_gives_empty_bag(self):
        assert nearmiss.snippet_bag("# nothing but comment") == Counter()


# ---------------------------------------------------------------------------
# pair predicate
# ---------------------------------------------------------------------------


class TestIsClonePair:
    def test_worked_example_below_threshold(self):
        b1 = Counter({"a": 2, "b": 1, "c": 1})
        b2 = Counter({"a": 1, "b": 1, "c": 1, "d": 1})
        # overlap 3 < ceil(0.8 * 4) = 4
        assert not nearmiss.is_clone_pair(b1, b2, nearmiss.DetectorConfig(theta=0.8))

    def test_ten_token_bags_sharing_eight(self):
        b1 = Counter({f"t{i}": 1 for i in range(10)})
        b2 = Counter({f"t{i}": 1 for i in range(2, 12)})
        cfg = nearmiss.DetectorConfig(theta=0.8)
        assert nearmiss.is_clone_pair(b1, b2, cfg)

    def test_ten_token_bags_sharing_seven(self):
        b1 = Counter({f"t{i}": 1 for i in range(10)})
        b2 = Counter({f"t{i}": 1 for i in range(3, 13)})
        assert not nearmiss.is_clone_pair(b1, b2, nearmiss.DetectorConfig(theta=0.8))

    def test_identical_bags_pair_at_theta_one(self):
        b = Counter({"a": 1, "b": 1})
        assert nearmiss.is_clone_pair(b, b, nearmiss.DetectorConfig(theta=1.0))

    def test_single_token_bags_never_pair(self):
        b = Counter({"a": 1})
        assert not nearmiss.is_clone_pair(b, b, nearmiss.DetectorConfig(theta=0.5))

    def test_empty_bags_never_pair(self):
        assert not nearmiss.is_clone_pair(Counter(), Counter(), nearmiss.DetectorConfig())

    def test_threshold_ceiling_is_exact_in_decimal(self):
        # ceil(0.7 * 10) must be 7, not 8 (a float product of 0.7*10 rounds
        # above 7.0 in binary arithmetic)
        b1 = Counter({f"t{i}": 1 for i in range(10)})
        b2 = Counter({f"t{i}": 1 for i in range(3, 13)})  # overlap 7
        assert nearmiss.is_clone_pair(b1, b2, nearmiss.DetectorConfig(theta=0.7))

    def test_multiset_overlap_uses_min_counts(self):
        b1 = Counter({"a": 3, "b": 1})
        b2 = Counter({"a": 1, "b": 3})
        # overlap = 1 + 1 = 2 < ceil(0.8 * 4) = 4
        assert not nearmiss.is_clone_pair(b1, b2, nearmiss.DetectorConfig(theta=0.8))
        # but theta = 0.5 -> need 2, have 2
        assert nearmiss.is_clone_pair(b1, b2, nearmiss.DetectorConfig(theta=0.5))

    def test_invalid_theta_rejected(self):
        with pytest.raises(ValidationError):
            nearmiss.DetectorConfig(theta=0.0)
        with pytest.raises(ValidationError):
            nearmiss.DetectorConfig(theta=1.2)

    @given(
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 3), max_size=6),
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 3), max_size=6),
    )
    def test_symmetry(self, d1, d2):
        cfg = nearmiss.DetectorConfig(theta=0.8)
        b1, b2 = Counter(d1), Counter(d2)
        assert nearmiss.is_clone_pair(b1, b2, cfg) == nearmiss.is_clone_pair(b2, b1, cfg)

    @given(st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 3), min_size=2))
    def test_reflexive_for_bags_of_two_or_more(self, d):
        b = Counter(d)
        assert nearmiss.is_clone_pair(b, b, nearmiss.DetectorConfig(theta=1.0))


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------


def _random_bags(rng, n, vocab=40, dup_rate=0.3):
    """Bags with planted near-duplicates so thresholds actually matter."""
    bags = {}
    pool = [f"tok{i}" for i in range(vocab)]
    i = 0
    while len(bags) < n:
        ref = (f"nb{i // 4:03d}", i % 4)
        i += 1
        if bags and rng.random() < dup_rate:
            base = Counter(bags[rng.choice(list(bags))])
            # mutate a couple of tokens
            for _ in range(rng.randrange(0, 3)):
                if base and rng.random() < 0.5:
                    victim = rng.choice(list(base))
                    base[victim] -= 1
                    if base[victim] == 0:
                        del base[victim]
                base[rng.choice(pool)] += 1
            bags[ref] = base
        else:
            size = rng.randrange(0, 14)
            bags[ref] = Counter(rng.choices(pool, k=size))
    return bags


class TestDetection:
    def test_matches_bruteforce_on_random_corpus(self):
        rng = random.Random(42)
        bags = _random_bags(rng, 150)
        cfg = nearmiss.DetectorConfig(theta=0.8)
        fast = nearmiss.detect_clone_pairs(bags, cfg)
        slow = nearmiss.detect_clone_pairs_bruteforce(bags, cfg)
        assert fast == slow

    def test_matches_bruteforce_at_theta_one(self):
        rng = random.Random(7)
        bags = _random_bags(rng, 100)
        cfg = nearmiss.DetectorConfig(theta=1.0)
        assert nearmiss.detect_clone_pairs(bags, cfg) == (
            nearmiss.detect_clone_pairs_bruteforce(bags, cfg)
        )

    def test_pairs_are_canonically_ordered_and_irreflexive(self):
        rng = random.Random(3)
        bags = _random_bags(rng, 80)
        pairs = nearmiss.detect_clone_pairs(bags, nearmiss.DetectorConfig())
        for left, right in pairs:
            assert left < right

    def test_intra_notebook_pairs_are_reported(self):
        b = Counter({"a": 1, "b": 1, "c": 1})
        bags = {("nb1", 0): b, ("nb1", 1): Counter(b)}
        pairs = nearmiss.detect_clone_pairs(bags, nearmiss.DetectorConfig())
        assert pairs == {(("nb1", 0), ("nb1", 1))}

    def test_theta_monotonicity(self):
        rng = random.Random(11)
        bags = _random_bags(rng, 120)
        strict = nearmiss.detect_clone_pairs(bags, nearmiss.DetectorConfig(theta=0.9))
        mid = nearmiss.detect_clone_pairs(bags, nearmiss.DetectorConfig(theta=0.8))
        loose = nearmiss.detect_clone_pairs(bags, nearmiss.DetectorConfig(theta=0.7))
        assert strict <= mid <= loose

    def test_token_count_filters_exclude_bags(self):
        big = Counter({f"t{i}": 1 for i in range(30)})
        bags = {
            ("a", 0): Counter({"x": 1, "y": 1}),
            ("a", 1): Counter({"x": 1, "y": 1}),
            ("b", 0): big,
            ("b", 1): Counter(big),
        }
        cfg = nearmiss.DetectorConfig(theta=0.8, min_tokens=0, max_tokens=10)
        pairs = nearmiss.detect_clone_pairs(bags, cfg)
        assert pairs == {(("a", 0), ("a", 1))}
        cfg = nearmiss.DetectorConfig(theta=0.8, min_tokens=5)
        assert nearmiss.detect_clone_pairs(bags, cfg) == {(("b", 0), ("b", 1))}

    def test_bruteforce_respects_filters_too(self):
        bags = {
            ("a", 0): Counter({"x": 1, "y": 1}),
            ("a", 1): Counter({"x": 1, "y": 1}),
        }
        cfg = nearmiss.DetectorConfig(theta=0.8, min_tokens=3)
        assert nearmiss.detect_clone_pairs_bruteforce(bags, cfg) == set()


class TestCheckpointing:
    def test_checkpoint_file_written_and_result_unchanged(self, tmp_path):
        rng = random.Random(19)
        bags = _random_bags(rng, 90)
        cfg = nearmiss.DetectorConfig(theta=0.8)
        plain = nearmiss.detect_clone_pairs(bags, cfg)
        ckpt = tmp_path / "pairs.ckpt"
        with_ckpt = nearmiss.detect_clone_pairs(
            bags, cfg, checkpoint_path=ckpt, partition_size=16
        )
        assert with_ckpt == plain
        assert ckpt.exists()

    def test_resume_from_partial_checkpoint(self, tmp_path):
        rng = random.Random(23)
        bags = _random_bags(rng, 90)
        cfg = nearmiss.DetectorConfig(theta=0.8)
        ckpt = tmp_path / "pairs.ckpt"
        full = nearmiss.detect_clone_pairs(
            bags, cfg, checkpoint_path=ckpt, partition_size=16
        )
        lines = ckpt.read_text().splitlines()
        assert len(lines) > 3
        # keep the header and the first two completed partitions only
        ckpt.write_text("\n".join(lines[:3]) + "\n")
        resumed = nearmiss.detect_clone_pairs(
            bags, cfg, checkpoint_path=ckpt, partition_size=16
        )
        assert resumed == full

    def test_truncated_trailing_line_is_ignored(self, tmp_path):
        rng = random.Random(29)
        bags = _random_bags(rng, 60)
        cfg = nearmiss.DetectorConfig(theta=0.8)
        ckpt = tmp_path / "pairs.ckpt"
        full = nearmiss.detect_clone_pairs(
            bags, cfg, checkpoint_path=ckpt, partition_size=16
        )
        with open(ckpt, "a") as fh:
            fh.write('{"partition": 999, "pairs": [["nb')  # simulated crash
        resumed = nearmiss.detect_clone_pairs(
            bags, cfg, checkpoint_path=ckpt, partition_size=16
        )
        assert resumed == full

    def test_checkpoint_for_different_inputs_is_rejected(self, tmp_path):
        rng = random.Random(31)
        bags = _random_bags(rng, 60)
        cfg = nearmiss.DetectorConfig(theta=0.8)
        ckpt = tmp_path / "pairs.ckpt"
        nearmiss.detect_clone_pairs(bags, cfg, checkpoint_path=ckpt, partition_size=16)
        other = _random_bags(random.Random(99), 61)
        with pytest.raises(ValidationError):
            nearmiss.detect_clone_pairs(
                other, cfg, checkpoint_path=ckpt, partition_size=16
            )


# ---------------------------------------------------------------------------
# clone status / frequencies
# ---------------------------------------------------------------------------

FakeSnippet = namedtuple("FakeSnippet", "notebook_id cell_index sloc")


class TestCloneStatus:
    def test_frequency_over_non_empty_snippets(self):
        snippets = [
            FakeSnippet("nb1", 0, 3),
            FakeSnippet("nb1", 1, 1),
            FakeSnippet("nb1", 2, 2),
            FakeSnippet("nb1", 3, 0),  # comment-only: not in the denominator
            FakeSnippet("nb2", 0, 5),
        ]
        pairs = {
            (("nb1", 0), ("nb2", 0)),
            (("nb1", 0), ("nb1", 1)),
        }
        status = nearmiss.clone_status(pairs, snippets)
        assert status.cloned == {("nb1", 0), ("nb1", 1), ("nb2", 0)}
        assert status.notebook_frequency["nb1"] == pytest.approx(2 / 3)
        assert status.notebook_frequency["nb2"] == pytest.approx(1.0)

    def test_notebook_without_code_has_frequency_zero(self):
        snippets = [FakeSnippet("nb1", 0, 0)]
        status = nearmiss.clone_status(set(), snippets)
        assert status.notebook_frequency["nb1"] == 0.0


# ---------------------------------------------------------------------------
# pair-file sanitizer
# ---------------------------------------------------------------------------


class TestSanitizer:
    def test_embedded_binary_bytes_are_removed(self):
        out = nearmiss.sanitize_pair_lines(["1,\x002,3,4"])
        assert out.records == ((1, 2, 3, 4),)

    def test_duplicates_dropped_keeping_first(self):
        out = nearmiss.sanitize_pair_lines(["1,2,3,4", "5,6,7,8", "1,2,3,4"])
        assert out.records == ((1, 2, 3, 4), (5, 6, 7, 8))
        assert out.duplicates_dropped == 1

    def test_wrong_field_count_dropped_and_counted(self):
        out = nearmiss.sanitize_pair_lines(["9,10,11,12,13", "1,2,3,4"])
        assert out.records == ((1, 2, 3, 4),)
        assert out.malformed_dropped == 1

    def test_line_reduced_to_nothing_counts_as_blank(self):
        out = nearmiss.sanitize_pair_lines(["junk without digits", "1,2,3,4"])
        assert out.records == ((1, 2, 3, 4),)
        assert out.blank_dropped == 1

    def test_empty_fields_are_malformed(self):
        out = nearmiss.sanitize_pair_lines(["1,,3,4"])
        assert out.records == ()
        assert out.malformed_dropped == 1

    def test_duplicate_detected_after_cleaning(self):
        out = nearmiss.sanitize_pair_lines(["1,2,3,4", "1,\x002,3,4"])
        assert out.records == ((1, 2, 3, 4),)
        assert out.duplicates_dropped == 1

    def test_input_order_preserved(self):
        out = nearmiss.sanitize_pair_lines(["5,6,7,8", "1,2,3,4"])
        assert out.records == ((5, 6, 7, 8), (1, 2, 3, 4))


# ---------------------------------------------------------------------------
# documented boundary of the token-level approach
# ---------------------------------------------------------------------------


def test_whitespace_fusion_changes_bags():
    """Deleting (rather than reshaping) whitespace can merge two tokens.

    "a b" and "ab" are identical once all whitespace is removed, yet they
    tokenize to disjoint bags. Whitespace-insensitive exact matching and
    token-bag matching therefore only nest when whitespace variation keeps
    token boundaries intact, which is how the fixture generators write
    their clone variants.
    """
    assert nearmiss.tokenize("a b") == Counter({"a": 1, "b": 1})
    assert nearmiss.tokenize("ab") == Counter({"ab": 1})
