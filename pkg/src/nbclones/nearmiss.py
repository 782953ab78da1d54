"""Near-miss clone detection over comment-stripped token bags.

A snippet is reduced to a bag (multiset) of tokens: comments are stripped
with a token-level scanner, then the remaining text is split on a fixed
separator set. Two bags of at least two tokens each form a clone pair when
their multiset overlap reaches ``ceil(theta * max(|b1|, |b2|))``.

``detect_clone_pairs`` runs an inverted-index search with multiset prefix
filtering; it returns exactly the pairs brute force would (the prefix of a
bag, taken in a rarest-first global token order, must share a token with
the prefix of any bag it can pair with). ``detect_clone_pairs_bruteforce``
is the all-pairs oracle kept for verification.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from nbclones.errors import ValidationError

logger = logging.getLogger(__name__)

#: Characters besides whitespace that end a token.
SEPARATOR_CHARS = ";.[]()~!-+&*/%<>^|?{}=#,\"\\:$'`@"


@dataclass(frozen=True)
class TokenizerConfig:
    inline_marker: str = "#"
    block_marker: str = '"""'
    separators: str = SEPARATOR_CHARS


DEFAULT_TOKENIZER = TokenizerConfig()


# ---------------------------------------------------------------------------
# comment stripping and tokenization
# ---------------------------------------------------------------------------


def strip_comments(source: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> str:
    """Delete comment text while preserving line structure.

    Within a line, everything from an inline marker to the end of the line
    is a comment. A block marker toggles block-comment state, which carries
    across lines; the markers themselves are deleted with the comment. An
    inline marker seen first neutralises a block marker later in the same
    line. An unterminated block comment strips to the end of the source
    and logs a warning.
    """
    inline, block = config.inline_marker, config.block_marker
    in_block = False
    out_lines = []
    for line in source.split("\n"):
        kept: list[str] = []
        i = 0
        while i < len(line):
            if in_block:
                end = line.find(block, i)
                if end < 0:
                    i = len(line)
                else:
                    i = end + len(block)
                    in_block = False
            else:
                h = line.find(inline, i)
                b = line.find(block, i)
                if h < 0 and b < 0:
                    kept.append(line[i:])
                    break
                if b < 0 or (0 <= h < b):
                    kept.append(line[i:h])
                    i = len(line)  # rest of the line is comment
                else:
                    kept.append(line[i:b])
                    i = b + len(block)
                    in_block = True
        out_lines.append("".join(kept))
    if in_block:
        logger.warning("unterminated block comment; stripped to end of snippet")
    return "\n".join(out_lines)


@lru_cache(maxsize=8)
def _separator_pattern(separators: str) -> re.Pattern[str]:
    return re.compile("[" + re.escape(separators) + r"\s]+")


def tokenize(code: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> Counter[str]:
    """Split ``code`` on separators and whitespace into a token bag."""
    pattern = _separator_pattern(config.separators)
    return Counter(tok for tok in pattern.split(code) if tok)


def snippet_bag(source: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> Counter[str]:
    """Token bag of a snippet: comments stripped, then tokenized."""
    return tokenize(strip_comments(source, config), config)


def bag_size(bag: Mapping[str, int]) -> int:
    return sum(bag.values())


# ---------------------------------------------------------------------------
# pair predicate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectorConfig:
    """Similarity threshold and bag-size eligibility window."""

    theta: float = 0.8
    min_tokens: int = 0
    max_tokens: int = 500_000_000

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ValidationError(f"theta must lie in (0, 1], got {self.theta!r}")
        if self.min_tokens < 0 or self.max_tokens < self.min_tokens:
            raise ValidationError("need 0 <= min_tokens <= max_tokens")


@lru_cache(maxsize=32)
def _theta_fraction(theta: float) -> Fraction:
    # exact decimal reading of the threshold: with binary floats,
    # ceil(0.7 * 10) would evaluate to 8
    return Fraction(str(theta))


def required_overlap(size1: int, size2: int, config: DetectorConfig) -> int:
    """ceil(theta * max(size1, size2)), computed in exact arithmetic."""
    frac = _theta_fraction(config.theta)
    m = max(size1, size2)
    return -((-frac.numerator * m) // frac.denominator)


def is_clone_pair(
    bag1: Mapping[str, int], bag2: Mapping[str, int], config: DetectorConfig = DetectorConfig()
) -> bool:
    """True iff both bags have >= 2 tokens and their overlap meets theta."""
    s1, s2 = bag_size(bag1), bag_size(bag2)
    if s1 < 2 or s2 < 2:
        return False
    needed = required_overlap(s1, s2, config)
    if min(s1, s2) < needed:
        return False
    small, large = (bag1, bag2) if s1 <= s2 else (bag2, bag1)
    overlap = 0
    for tok, c in small.items():
        other = large.get(tok)
        if other:
            overlap += c if c <= other else other
    return overlap >= needed


def _overlap_reaches(
    small: Mapping[int, int], large: Mapping[int, int], small_size: int, needed: int
) -> bool:
    """Early-exit multiset overlap check on integer-keyed bags."""
    overlap = 0
    remaining = small_size
    for tok, c in small.items():
        remaining -= c
        other = large.get(tok)
        if other:
            overlap += c if c <= other else other
            if overlap >= needed:
                return True
        if overlap + remaining < needed:
            return False
    return overlap >= needed


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------

Ref = Hashable
ClonePair = tuple


def _eligible_items(
    bags: Mapping[Ref, Mapping[str, int]], config: DetectorConfig
) -> list[tuple[Ref, Mapping[str, int], int]]:
    items = []
    for ref, bag in bags.items():
        size = bag_size(bag)
        if size < 2 or size < config.min_tokens or size > config.max_tokens:
            continue
        items.append((ref, bag, size))
    items.sort(key=lambda item: item[0])
    return items


def detect_clone_pairs_bruteforce(
    bags: Mapping[Ref, Mapping[str, int]], config: DetectorConfig = DetectorConfig()
) -> set[ClonePair]:
    """All-pairs oracle; quadratic, for verification and small corpora."""
    items = _eligible_items(bags, config)
    frac = _theta_fraction(config.theta)
    pairs: set[ClonePair] = set()
    for i in range(len(items)):
        ref_i, bag_i, size_i = items[i]
        for j in range(i + 1, len(items)):
            ref_j, bag_j, size_j = items[j]
            m = max(size_i, size_j)
            needed = -((-frac.numerator * m) // frac.denominator)
            if min(size_i, size_j) < needed:
                continue
            small, ssize, large = (
                (bag_i, size_i, bag_j) if size_i <= size_j else (bag_j, size_j, bag_i)
            )
            if _overlap_reaches(small, large, ssize, needed):
                pairs.add((ref_i, ref_j))
    return pairs


def _prepare_index(items, config):
    """Assign rarest-first token ids, build per-bag prefixes and the index.

    The prefix of a bag of size s holds the token types among its first
    ``s - ceil(theta*s) + 1`` instances in the global order. Any two bags
    whose overlap reaches the threshold must share a prefix token type, so
    an inverted index over prefixes generates every qualifying candidate.
    """
    frac = _theta_fraction(config.theta)
    freq: Counter[str] = Counter()
    for _, bag, _ in items:
        freq.update(bag)
    token_id = {
        tok: i
        for i, (tok, _) in enumerate(
            sorted(freq.items(), key=lambda kv: (kv[1], kv[0]))
        )
    }
    int_bags: list[dict[int, int]] = []
    sizes: list[int] = []
    prefixes: list[list[int]] = []
    index: defaultdict[int, list[int]] = defaultdict(list)
    for pos, (_, bag, size) in enumerate(items):
        ids = sorted((token_id[tok], c) for tok, c in bag.items())
        int_bags.append(dict(ids))
        sizes.append(size)
        prefix_len = size - (-((-frac.numerator * size) // frac.denominator)) + 1
        prefix: list[int] = []
        consumed = 0
        for tid, c in ids:
            prefix.append(tid)
            index[tid].append(pos)
            consumed += c
            if consumed >= prefix_len:
                break
        prefixes.append(prefix)
    return int_bags, sizes, prefixes, index, frac


def _query_partition(span, int_bags, sizes, prefixes, index, frac, refs):
    pairs = []
    for pos in span:
        size_q = sizes[pos]
        bag_q = int_bags[pos]
        seen = set()
        for tid in prefixes[pos]:
            for cand in index[tid]:
                if cand >= pos or cand in seen:
                    continue
                seen.add(cand)
                size_c = sizes[cand]
                m = size_c if size_c > size_q else size_q
                needed = -((-frac.numerator * m) // frac.denominator)
                if size_c < needed or size_q < needed:
                    continue
                if size_c <= size_q:
                    hit = _overlap_reaches(int_bags[cand], bag_q, size_c, needed)
                else:
                    hit = _overlap_reaches(bag_q, int_bags[cand], size_q, needed)
                if hit:
                    pairs.append((refs[cand], refs[pos]))
    return pairs


def _fingerprint(items, config, partition_size: int) -> str:
    payload = json.dumps(
        {
            "theta": str(config.theta),
            "min_tokens": config.min_tokens,
            "max_tokens": config.max_tokens,
            "partition_size": partition_size,
            "bags": [[repr(ref), size] for ref, _, size in items],
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _ref_from_json(value):
    return tuple(value) if isinstance(value, list) else value


def _load_checkpoint(path: Path, fingerprint: str):
    """Completed partitions from a checkpoint file.

    Returns (done: dict partition -> pairs, byte offset of the last intact
    line). Anything after a truncated or corrupt line is discarded, so a
    crash mid-write only costs the partition that was being written.
    """
    raw = path.read_bytes()
    offset = 0
    header_seen = False
    done: dict[int, list[ClonePair]] = {}
    while True:
        newline = raw.find(b"\n", offset)
        if newline < 0:
            break  # partial trailing write, if anything
        line = raw[offset:newline]
        if line:
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                break  # corrupt line: discard it and everything after
            if not header_seen:
                if record.get("fingerprint") != fingerprint:
                    raise ValidationError(
                        "checkpoint does not match these bags and settings; "
                        "remove it or point at the original inputs"
                    )
                header_seen = True
            else:
                done[int(record["partition"])] = [
                    (_ref_from_json(a), _ref_from_json(b)) for a, b in record["pairs"]
                ]
        offset = newline + 1
    if not header_seen:
        return None  # unusable file: caller starts fresh
    return done, offset


def detect_clone_pairs(
    bags: Mapping[Ref, Mapping[str, int]],
    config: DetectorConfig = DetectorConfig(),
    *,
    checkpoint_path: str | Path | None = None,
    partition_size: int = 4096,
) -> set[ClonePair]:
    """Find every clone pair among ``bags``; equals the brute-force result.

    Pairs are canonically ordered (smaller reference first). When
    ``checkpoint_path`` is given, the query sequence is partitioned and each
    completed partition is appended to the checkpoint file; re-running with
    the same inputs skips completed partitions, and because pairs are keyed
    by their canonical form, replaying a partition cannot duplicate any.
    References must be JSON-representable when checkpointing is used.
    """
    if partition_size < 1:
        raise ValidationError("partition_size must be >= 1")
    items = _eligible_items(bags, config)
    refs = [ref for ref, _, _ in items]
    int_bags, sizes, prefixes, index, frac = _prepare_index(items, config)
    n = len(items)
    spans = [range(s, min(s + partition_size, n)) for s in range(0, n, partition_size)]

    if checkpoint_path is None:
        out: set[ClonePair] = set()
        for span in spans:
            out.update(_query_partition(span, int_bags, sizes, prefixes, index, frac, refs))
        return out

    path = Path(checkpoint_path)
    fingerprint = _fingerprint(items, config, partition_size)
    done: dict[int, list[ClonePair]] = {}
    if path.exists():
        loaded = _load_checkpoint(path, fingerprint)
        if loaded is None:
            path.unlink()
        else:
            done, offset = loaded
            with open(path, "r+b") as fh:
                fh.truncate(offset)
    if not path.exists():
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"fingerprint": fingerprint}) + "\n")

    out = set()
    with open(path, "a", encoding="utf-8") as fh:
        for k, span in enumerate(spans):
            if k in done:
                out.update(done[k])
                continue
            found = _query_partition(span, int_bags, sizes, prefixes, index, frac, refs)
            fh.write(json.dumps({"partition": k, "pairs": found}) + "\n")
            fh.flush()
            out.update(found)
    return out


# ---------------------------------------------------------------------------
# clone status per snippet / notebook
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CloneStatus:
    """Which snippets are cloned, and each notebook's clone frequency."""

    cloned: frozenset
    notebook_frequency: dict


def clone_status(pairs: Iterable[ClonePair], snippets: Iterable) -> CloneStatus:
    """Per-snippet clone flags and per-notebook near-miss clone frequency.

    The frequency denominator counts snippets with at least one source line
    left after comment stripping (sloc >= 1); a notebook with none gets 0.
    """
    cloned = frozenset(ref for pair in pairs for ref in pair)
    denom: dict[str, int] = defaultdict(int)
    num: dict[str, int] = defaultdict(int)
    notebooks = []
    for snip in snippets:
        nb = snip.notebook_id
        notebooks.append(nb)
        if snip.sloc >= 1:
            denom[nb] += 1
            if (nb, snip.cell_index) in cloned:
                num[nb] += 1
    freq = {nb: (num[nb] / denom[nb] if denom[nb] else 0.0) for nb in notebooks}
    return CloneStatus(cloned=cloned, notebook_frequency=freq)


# ---------------------------------------------------------------------------
# pair-file sanitizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SanitizedPairs:
    """Cleaned pair records plus per-category drop counts."""

    records: tuple[tuple[int, int, int, int], ...]
    duplicates_dropped: int
    malformed_dropped: int
    blank_dropped: int


_KEEP_CHARS = frozenset("0123456789,")


def sanitize_pair_lines(lines: Iterable[str]) -> SanitizedPairs:
    """Clean a pair file produced by an external detector.

    Per line: every character that is not a digit or comma is deleted;
    exact duplicate lines (after cleaning) are dropped keeping the first;
    lines that do not hold exactly four integer fields are dropped and
    counted. Input order is preserved.
    """
    records: list[tuple[int, int, int, int]] = []
    seen: set[str] = set()
    duplicates = malformed = blank = 0
    for line in lines:
        cleaned = "".join(ch for ch in line if ch in _KEEP_CHARS)
        if not cleaned:
            blank += 1
            continue
        if cleaned in seen:
            duplicates += 1
            continue
        seen.add(cleaned)
        fields = cleaned.split(",")
        if len(fields) != 4 or not all(f.isdigit() for f in fields):
            malformed += 1
            continue
        a, b, c, d = (int(f) for f in fields)
        records.append((a, b, c, d))
    return SanitizedPairs(tuple(records), duplicates, malformed, blank)
