"""Clone detection and connection statistics for notebook corpora.

The package is organised as a pipeline over a corpus of notebook files:

- :mod:`nbclones.ingest` reads a corpus manifest and parses notebooks into
  code snippets with line counts.
- :mod:`nbclones.langid` classifies each notebook's programming language
  from its metadata.
- :mod:`nbclones.cmw` finds exact clones: snippets that are identical once
  every whitespace character is removed (copy-modulo-whitespace).
- :mod:`nbclones.nearmiss` finds near-miss clones: snippets whose
  comment-stripped token bags overlap above a similarity threshold.
- :mod:`nbclones.connections` aggregates clone pairs into per-notebook
  connection profiles (within-repository vs. across-repository edges).
- :mod:`nbclones.stats` is the rank-statistics kernel used by the reports.
- :mod:`nbclones.report` orchestrates the full pipeline and writes CSV
  bundles; :mod:`nbclones.cli` exposes everything as subcommands.
"""

from nbclones.errors import ValidationError

__version__ = "0.1.0"

__all__ = ["ValidationError", "__version__"]
