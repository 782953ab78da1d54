"""Parse a small notebook corpus from disk and summarize its sizes.

Builds three notebook files in a temporary directory -- one healthy, one
with a broken cell container, one that is not JSON at all -- plus a
manifest, then shows how parsing classifies each file and what the size
summary over the analyzable ones looks like.
"""

import json
import tempfile
from pathlib import Path

from nbclones import ingest


def notebook_json(*cell_sources: str) -> str:
    return json.dumps(
        {
            "nbformat": 4,
            "metadata": {"language_info": {"name": "python"}},
            "cells": [
                {"cell_type": "code", "source": src, "outputs": []}
                for src in cell_sources
            ],
        }
    )


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        (root / "clean.ipynb").write_text(
            notebook_json("import numpy as np", "x = np.arange(10)\nprint(x.sum())")
        )
        (root / "broken_cells.ipynb").write_text(
            '{"nbformat": 4, "metadata": {}, "cells": "not a list"}'
        )
        (root / "garbage.ipynb").write_text("definitely not JSON {")
        manifest_path = root / "manifest.tsv"
        manifest_path.write_text(
            "clean\trepo_a\t0\tclean.ipynb\n"
            "broken\trepo_a\t0\tbroken_cells.ipynb\n"
            "garbage\trepo_b\t0\tgarbage.ipynb\n"
        )

        manifest = ingest.load_manifest(manifest_path)
        records = [
            ingest.read_notebook(entry, manifest.base_dir)
            for entry in manifest.active_entries()
        ]

        print("parse status per notebook:")
        for record in records:
            print(
                f"  {record.notebook_id:8s} {record.parse_status.value:18s}"
                f" code cells: {len(record.code_cells)}"
            )

        analyzed = [
            r for r in records if r.parse_status in ingest.ANALYZED_STATUSES
        ]
        print(f"\nanalyzable notebooks: {len(analyzed)} of {len(records)}")
        print("\nsize summary (min/median/mean/max per metric):")
        for metric, row in ingest.summarize_corpus(analyzed).as_ordered_pairs():
            print(
                f"  {metric:12s} min={row.min:g} median={row.median:g}"
                f" mean={row.mean:.2f} max={row.max:g}"
            )


if __name__ == "__main__":
    main()
