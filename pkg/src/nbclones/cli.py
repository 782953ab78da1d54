"""Command-line interface to the notebook clone analysis pipeline.

Every analysis subcommand runs the full pipeline over the corpus named by
``--manifest`` and writes its slice of the artifacts under ``--out-dir``;
``report`` writes everything. ``sanitize-pairs`` is the odd one out: it
cleans a pair file produced by an external detector and touches no corpus.

Failures exit nonzero with a one-line JSON error record on stderr:
exit code 2 for validation problems, 3 for I/O problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import nearmiss, report
from .errors import ValidationError

#: Artifact sections written by each analysis subcommand.
SECTION_MAP = {
    "ingest": ("parse", "sizes"),
    "langid": ("languages",),
    "cmw": ("cmw",),
    "nearmiss": ("nearmiss",),
    "connections": ("cmw-connections", "nearmiss-connections"),
    "stats": ("tests",),
    "top-clones": ("top-clones",),
    "report": tuple(report.SECTION_WRITERS),
}

_COMMAND_HELP = {
    "ingest": "parse the corpus and write parse and size summaries",
    "langid": "classify notebook languages and write the distribution",
    "cmw": "group exact clones and write clone summaries",
    "nearmiss": "detect near-miss clones and write their summaries and pairs",
    "connections": "write connection profiles and summaries for both clone types",
    "stats": "write the statistical test tables",
    "top-clones": "write the most common clone groups",
    "report": "run everything and write the full artifact bundle",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbclones",
        description="Clone analysis over a corpus of Jupyter notebooks.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    defaults = report.PipelineConfig()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--manifest",
        required=True,
        help="corpus manifest: one 'id<TAB>repo<TAB>is_fork<TAB>path' line per notebook",
    )
    common.add_argument(
        "--out-dir", required=True, help="directory receiving the artifacts"
    )
    common.add_argument(
        "--theta",
        type=float,
        default=defaults.theta,
        help="near-miss similarity threshold in (0, 1]",
    )
    common.add_argument(
        "--min-tokens",
        type=int,
        default=defaults.min_tokens,
        help="smallest token-bag size eligible for near-miss detection",
    )
    common.add_argument(
        "--max-tokens",
        type=int,
        default=defaults.max_tokens,
        help="largest token-bag size eligible for near-miss detection",
    )
    common.add_argument(
        "--nearmiss-language",
        default=defaults.nearmiss_language,
        help="language group whose notebooks enter near-miss detection",
    )
    common.add_argument(
        "--include-empty",
        action="store_true",
        help="keep whitespace-empty snippets inside the exact-clone groups",
    )
    common.add_argument(
        "--selfloop-mode",
        choices=("single", "degree"),
        default=defaults.selfloop_mode,
        help="count a notebook-to-itself edge once or twice",
    )
    common.add_argument(
        "--top-n",
        type=int,
        default=defaults.top_n,
        help="number of entries in the top-clone listing",
    )
    common.add_argument(
        "--min-loc",
        type=int,
        default=defaults.min_loc,
        help="smallest group median line count kept in the top-clone listing",
    )
    common.add_argument(
        "--workers",
        type=int,
        default=defaults.workers,
        help="parallel parser processes (results are identical for any value)",
    )
    for name, help_text in _COMMAND_HELP.items():
        subparsers.add_parser(name, help=help_text, parents=[common])

    sanitize = subparsers.add_parser(
        "sanitize-pairs",
        help="clean a detector pair file: strip noise, drop duplicates and malformed lines",
    )
    sanitize.add_argument("--input", required=True, help="raw pair file")
    sanitize.add_argument("--output", required=True, help="cleaned pair file")
    return parser


def _config_from_args(args: argparse.Namespace) -> report.PipelineConfig:
    return report.PipelineConfig(
        theta=args.theta,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
        nearmiss_language=args.nearmiss_language,
        include_empty=args.include_empty,
        selfloop_mode=args.selfloop_mode,
        top_n=args.top_n,
        min_loc=args.min_loc,
        workers=args.workers,
    )


def _run_sanitize(args: argparse.Namespace) -> None:
    raw = Path(args.input).read_text(encoding="utf-8", errors="surrogateescape")
    result = nearmiss.sanitize_pair_lines(raw.splitlines())
    out = Path(args.output)
    tmp = out.with_name(out.name + ".tmp")
    body = "".join(",".join(str(v) for v in rec) + "\n" for rec in result.records)
    tmp.write_text(body, encoding="utf-8")
    os.replace(tmp, out)
    print(
        json.dumps(
            {
                "kept": len(result.records),
                "duplicates_dropped": result.duplicates_dropped,
                "malformed_dropped": result.malformed_dropped,
                "blank_dropped": result.blank_dropped,
            }
        )
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sanitize-pairs":
            _run_sanitize(args)
        else:
            bundle = report.run_pipeline(args.manifest, _config_from_args(args))
            written = report.write_artifacts(
                bundle, args.out_dir, SECTION_MAP[args.command]
            )
            for path in written:
                print(path)
    except ValidationError as exc:
        _print_error(exc)
        return 2
    except OSError as exc:
        _print_error(exc)
        return 3
    return 0


def _print_error(exc: Exception) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
