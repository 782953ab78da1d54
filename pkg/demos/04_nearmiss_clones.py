"""Detect near-miss clones with token bags and an overlap threshold.

Snippets become multisets of tokens (comments stripped, separators and
whitespace discarded). Two snippets are near-miss clones when their bags
overlap in at least ceil(theta * max(|A|, |B|)) tokens. The demo shows
tokenization, a threshold sweep over the same corpus, and the pair-file
sanitizer used on noisy detector output.
"""

from nbclones import nearmiss


SNIPPETS = {
    ("stats", 0): "mean = total / count\nprint(mean)",
    ("stats", 1): "mean = total / count\nprint(mean)  # same code, new comment",
    ("stats", 2): "mean = total / count\nprint(round(mean))",       # one edit
    ("vis", 0): "plot(xs, ys)\nshow()",
    ("vis", 1): "savefig(path)",                                    # too small
}


def main() -> None:
    bags = {ref: nearmiss.snippet_bag(text) for ref, text in SNIPPETS.items()}
    print("token bags:")
    for ref, bag in bags.items():
        tokens = " ".join(sorted(bag.elements()))
        print(f"  {ref[0]}[{ref[1]}]  size {nearmiss.bag_size(bag):2d}:  {tokens}")

    print("\npairs found at decreasing thresholds (lower = more permissive):")
    for theta in (1.0, 0.8, 0.6):
        config = nearmiss.DetectorConfig(theta=theta)
        pairs = sorted(nearmiss.detect_clone_pairs(bags, config))
        text = ", ".join(f"{a[0]}[{a[1]}]~{b[0]}[{b[1]}]" for a, b in pairs) or "none"
        print(f"  theta {theta:.1f}: {text}")

    print("\nsanitizing a noisy pair file (digits and commas survive):")
    raw_lines = ["7,0,9,1", "7,0,9,1", "3,\x002,5,4\x07", "1,2,3", "###"]
    result = nearmiss.sanitize_pair_lines(raw_lines)
    print(f"  kept {len(result.records)}: {list(result.records)}")
    print(
        f"  dropped: {result.duplicates_dropped} duplicate,"
        f" {result.malformed_dropped} malformed, {result.blank_dropped} blank"
    )


if __name__ == "__main__":
    main()
