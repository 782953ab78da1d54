"""Run the whole pipeline over a corpus and write the report bundle.

Creates a five-notebook corpus on disk, runs parsing, language
identification, exact and near-miss clone detection, connection
statistics and the rank tests in one call, then writes the full CSV/JSON
artifact bundle and prints a tour of the results.
"""

import json
import tempfile
from pathlib import Path

from nbclones import report


def notebook_json(*cell_sources: str, language: str = "python") -> str:
    return json.dumps(
        {
            "nbformat": 4,
            "metadata": {"language_info": {"name": language}},
            "cells": [
                {"cell_type": "code", "source": src, "outputs": []}
                for src in cell_sources
            ],
        }
    )


CORPUS = {
    "ingest": ("team_a", notebook_json("import numpy as np", "data = np.ones(3)")),
    "copyist": ("team_a", notebook_json("import  numpy  as  np")),
    "fork_of_ingest": ("team_b", notebook_json("import numpy as np")),
    "original": ("team_b", notebook_json("result = data.cumsum()\nprint(result)")),
    "r_report": ("team_c", notebook_json("summary <- table(x)", language="R")),
}


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        lines = []
        for nb_id, (repo, text) in CORPUS.items():
            (root / f"{nb_id}.ipynb").write_text(text)
            fork = "1" if nb_id.startswith("fork") else "0"
            lines.append(f"{nb_id}\t{repo}\t{fork}\t{nb_id}.ipynb")
        manifest = root / "manifest.tsv"
        manifest.write_text("\n".join(lines) + "\n")

        out_dir = root / "bundle"
        bundle = report.run_pipeline(manifest, out_dir=out_dir)

        print(f"analyzed notebooks: {bundle.analyzed_notebooks}"
              f" (of {bundle.parse_summary['manifest_entries']} listed;"
              f" {bundle.parse_summary['fork_excluded']} fork excluded)")
        print(f"exact clone groups: {bundle.cmw.clone_groups},"
              f" clone ratio {bundle.cmw.clone_ratio:.0%}")
        print(f"near-miss pairs among {bundle.nearmiss.language} notebooks:"
              f" {len(bundle.nearmiss.pairs)}")
        if bundle.top_clones:
            top = bundle.top_clones[0]
            print(f"most common snippet (x{top.occurrences}):"
                  f" {top.representative!r}")

        artifacts = sorted(p.relative_to(out_dir) for p in out_dir.rglob("*.csv"))
        print(f"\nwrote {len(artifacts)} CSV artifacts (plus run_manifest.json):")
        for path in artifacts:
            print(f"  {path}")


if __name__ == "__main__":
    main()
