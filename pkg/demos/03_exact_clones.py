"""Group snippets into exact clone classes, ignoring only whitespace.

Two snippets are exact clones when they are identical after deleting
every whitespace character -- indentation, blank lines, spacing around
operators. Comments still count. The demo plants a three-way clone with
different formatting, shows per-notebook clone frequency, the corpus
clone ratio, and whole-notebook clone classes.
"""

from nbclones import cmw, ingest
from nbclones.ingest import ParseStatus


def snippet(nb: str, idx: int, text: str) -> ingest.Snippet:
    lines = tuple(text.split("\n"))
    total, nonblank, sloc = ingest.count_lines(lines)
    return ingest.Snippet(nb, idx, lines, total, nonblank, sloc)


def record(nb: str, repo: str, *texts: str) -> ingest.NotebookRecord:
    cells = tuple(snippet(nb, i, t) for i, t in enumerate(texts))
    return ingest.NotebookRecord(
        nb, repo, 0, nb, ParseStatus.OK, cells, ingest.EMPTY_EVIDENCE
    )


def main() -> None:
    records = [
        record("tidy", "r1", "total = a + b", "print(total)"),
        record("spaced", "r1", "total   =   a+b"),
        record("indented", "r2", "  total = a + b", "unique_line = 1"),
    ]
    snippets = [s for r in records for s in r.code_cells]

    grouping = cmw.build_clone_groups(snippets)
    print("clone groups (members sharing one whitespace-normalized form):")
    for group in grouping.groups:
        members = ", ".join(f"{nb}[{idx}]" for nb, idx in group.members)
        print(
            f"  x{group.occurrence_count}  median LOC {group.median_loc}:  {members}"
        )

    print("\nper-notebook clone frequency (cloned / non-empty snippets):")
    for r in records:
        print(f"  {r.notebook_id:9s} {cmw.clone_frequency(r, grouping):.0%}")

    ratio = cmw.corpus_clone_ratio(grouping)
    print(f"\ncorpus clone ratio: {ratio:.0%} of snippets sit in a group of >= 2")

    print("\nwhole-notebook clones (same cell count, cell-wise identical):")
    twins = [
        record("nb_a", "r1", "import os", "x = 1"),
        record("nb_b", "r2", "import  os", "x=1"),  # formatting differs only
        record("nb_c", "r2", "import os", "y = 2"),
    ]
    for cls in cmw.notebook_clone_classes(twins):
        if len(cls.members) >= 2:
            print(f"  {' == '.join(cls.members)}  ({cls.cell_count} cells)")


if __name__ == "__main__":
    main()
