"""Classify notebook languages from their declaration metadata.

A notebook can declare its language in several places: the language_info
metadata block, a top-level language field, the kernel specification, or
per-cell language fields in older documents. Classification takes the
first usable value in that order; when the sources disagree, the notebook
is additionally flagged as conflicting.
"""

from nbclones import langid
from nbclones.ingest import LanguageEvidence


EXAMPLES = [
    ("language_info says Python 3", LanguageEvidence("Python 3", None, None, ())),
    ("kernel says julia", LanguageEvidence(None, None, "julia", ())),
    ("cells agree on R", LanguageEvidence(None, None, None, ("R", "R"))),
    ("scala with version", LanguageEvidence("scala 2.12", None, None, ())),
    ("unmapped declaration", LanguageEvidence("bash", None, None, ())),
    ("no declaration anywhere", LanguageEvidence(None, None, None, (None,))),
    ("metadata python, cells R", LanguageEvidence("python", None, None, ("R",))),
]


def main() -> None:
    print(f"{'case':28s} {'classified':10s} conflict")
    for label, evidence in EXAMPLES:
        group = langid.classify_language(evidence)
        conflict = langid.detect_conflicts(evidence)
        print(f"{label:28s} {group.value:10s} {conflict.has_conflict}")

    print("\nreport order for language tables:")
    print("  " + ", ".join(group.value for group in langid.REPORT_ORDER))


if __name__ == "__main__":
    main()
