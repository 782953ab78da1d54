"""Deterministic generator for the golden regression corpus.

Thirty notebooks with a fully hand-checked structure: every clone group,
connection count, frequency, parse status, and language below is planted
on purpose, and the acceptance suite asserts the exact numbers. Regenerate
with ``python tests/make_golden_corpus.py`` after any intentional change,
then refresh the expected artifacts.

Planted layout (ids in manifest order):

* a1/b1 (repos ra/rb) — worked connection example: a1 holds an
  intra-notebook clone pair (self-loop) plus two cross-repo edges to b1
  (total 3); b1's two cells are themselves whitespace variants, so b1
  carries a self-loop of its own.
* r1/r2/r3 (repo rr) — clone groups of sizes 3, 2, 1 over the ratio_*
  snippets; r2 reverses the cell order so r1/r2 are not notebook clones.
* f0/f75/f100 (repo rf) — clone frequencies 0%, 75% (with one empty
  cell), and 100%.
* d1/d2 (repo rd) — whitespace-variant notebook-clone pair whose first
  cell is a four-line import block (exercises the top-clone LOC filter).
* dup1/dup2 (repo rq) — byte-identical files.
* e1..e5 (repo re) — one notebook per failure mode: not JSON, LFS
  pointer, unreadable cell container (with R metadata), unreadable code
  (two cells, python metadata), ill-formed JSON document.
* k1 (repo rk) — fork, excluded from analysis.
* m1 (repo rm) — zero code cells; forms a notebook-clone class with e3.
* nm1..nm4 (repo rn) — near-miss block: ten-token bags with an overlap
  of exactly 8 (pair at theta 0.8), a line-permuted variant inside nm2
  (near-miss clone but not an exact clone), a 7-of-10 negative, and a
  comment-only cell that is empty for near-miss but not for exact clones.
* c1 (repo rc) — metadata says python, the cell says R: a language
  conflict, classified python.
* rl1/j1/s1/o1/u1/u2 (repo rx) — language variety: R, julia, scala,
  other (bash), and two notebooks with no language evidence at all.

``import numpy as np`` appears in d1, d2, nm3, nm4, and c1: the top
clone, with five occurrences.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

DEFAULT_TARGET = Path(__file__).parent / "fixtures" / "golden"

_LFS_POINTER = (
    "version https://git-lfs.github.com/spec/v1\n"
    "oid sha256:2c26b46b68ffc68ff99b453c1d30413413422d706483bfa0f98a5e886266e7ae\n"
    "size 12345\n"
)

_IMPORT_BLOCK = ["import os\n", "import re\n", "import sys\n", "import json"]
_IMPORT_BLOCK_WS = ["import os\n", "import  re\n", "import sys\n", "import json"]

_NM_BASE = [f"nm_t{i}" for i in range(1, 11)]                  # tokens t1..t10
_NM_NEAR = [f"nm_t{i}" for i in range(1, 9)] + ["nm_u1", "nm_u2"]  # overlap 8
_NM_FAR = [f"nm_t{i}" for i in range(1, 8)] + ["nm_v1", "nm_v2", "nm_v3"]


def _notebook(cells: list, language: str | None = "python") -> str:
    """A minimal nbformat-4 document as deterministic JSON text."""
    metadata: dict = {}
    if language is not None:
        metadata["language_info"] = {"name": language}
    doc = {
        "nbformat": 4,
        "nbformat_minor": 5,
        "metadata": metadata,
        "cells": cells,
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _code(source, **extra) -> dict:
    cell = {"cell_type": "code", "source": source, "outputs": []}
    cell.update(extra)
    return cell


def _cells(*sources) -> list:
    return [_code(source) for source in sources]


def corpus_files() -> list[tuple[str, str, str, str]]:
    """(notebook_id, repo_id, fork_flag, file_text) in manifest order."""
    dup_text = _notebook(_cells("dup_marker = 99"))
    return [
        ("a1", "ra", "0", _notebook(_cells("alpha = 51", "alpha=51", "gamma_a = 53"))),
        ("b1", "rb", "0", _notebook(_cells("gamma_a  =  53", "gamma_a   =   53"))),
        ("r1", "rr", "0", _notebook(_cells("ratio_a = 10", "ratio_b = 20"))),
        ("r2", "rr", "0", _notebook(_cells("ratio_b  =  20", "ratio_a  =  10"))),
        ("r3", "rr", "0", _notebook(_cells("ratio_a = 10", "ratio_c = 30"))),
        ("f0", "rf", "0", _notebook(_cells("f0_u1 = 71", "f0_u2 = 72"))),
        (
            "f75",
            "rf",
            "0",
            _notebook(
                _cells("freq_x = 41", "freq_y = 42", "freq_z = 43", "freq_w = 44", "")
            ),
        ),
        (
            "f100",
            "rf",
            "0",
            _notebook(_cells("freq_x = 41", "freq_y = 42", "freq_z = 43")),
        ),
        (
            "d1",
            "rd",
            "0",
            _notebook([_code(_IMPORT_BLOCK), _code("import numpy as np")]),
        ),
        (
            "d2",
            "rd",
            "0",
            _notebook([_code(_IMPORT_BLOCK_WS), _code("import numpy as np")]),
        ),
        ("dup1", "rq", "0", dup_text),
        ("dup2", "rq", "0", dup_text),
        ("e1", "re", "0", "this is not valid json {\n"),
        ("e2", "re", "0", _LFS_POINTER),
        ("e3", "re", "0", json.dumps(
            {
                "nbformat": 4,
                "metadata": {"language_info": {"name": "R"}},
                "cells": "oops",
            },
            sort_keys=True,
        ) + "\n"),
        ("e4", "re", "0", _notebook([_code(12345), _code("e4_x = 1")])),
        ("e5", "re", "0", "[1, 2, 3]\n"),
        ("k1", "rk", "1", _notebook(_cells("fork_x = 1"))),
        ("m1", "rm", "0", _notebook([])),
        ("nm1", "rn", "0", _notebook(_cells("\n".join(_NM_BASE)))),
        (
            "nm2",
            "rn",
            "0",
            _notebook(_cells("\n".join(_NM_NEAR), "\n".join(reversed(_NM_NEAR)))),
        ),
        (
            "nm3",
            "rn",
            "0",
            _notebook(_cells("\n".join(_NM_FAR), "import numpy as np")),
        ),
        ("nm4", "rn", "0", _notebook(_cells("# setup notes", "import numpy as np"))),
        (
            "c1",
            "rc",
            "0",
            _notebook([_code("import numpy as np", language="R")]),
        ),
        ("rl1", "rx", "0", _notebook(_cells("r_line <- 1"), language="R")),
        ("j1", "rx", "0", _notebook(_cells("julia_x = 81"), language="julia")),
        ("s1", "rx", "0", _notebook(_cells("scala_x = 82"), language="scala")),
        ("o1", "rx", "0", _notebook(_cells("echo golden"), language="bash")),
        ("u1", "rx", "0", _notebook(_cells("u1_x = 95"), language=None)),
        ("u2", "rx", "0", _notebook(_cells("u2_x = 96"), language=None)),
    ]


def write_corpus(target: Path) -> Path:
    """Write the notebooks and manifest under ``target``; returns the manifest path."""
    target.mkdir(parents=True, exist_ok=True)
    lines = []
    for nb_id, repo_id, fork_flag, text in corpus_files():
        (target / f"{nb_id}.ipynb").write_text(text, encoding="utf-8")
        lines.append(f"{nb_id}\t{repo_id}\t{fork_flag}\t{nb_id}.ipynb")
    manifest = target / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


if __name__ == "__main__":
    destination = Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_TARGET
    print(write_corpus(destination))
