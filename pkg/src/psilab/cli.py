"""Command line: ``psilab run`` and ``psilab check``.

Exit codes: 0 success, 1 spec error (including unreadable files), 2 analysis error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dsl import SpecError, format_spec, parse_spec
from .runner import AnalysisError, run_spec

log = logging.getLogger("psilab")


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}", 0) from e
    return parse_spec(text)


def cmd_check(args) -> int:
    prog = _load(args.specfile)
    if args.print:
        sys.stdout.write(format_spec(prog))
    else:
        print(f"ok: {len(prog.declarations)} declarations, {len(prog.analyses)} analyses")
    return 0


def cmd_run(args) -> int:
    prog = _load(args.specfile)
    report = run_spec(prog)
    outputs = {"text": report.to_text(), "csv": report.to_csv()}
    wanted = ["text", "csv"] if args.format == "both" else [args.format]
    if args.out is None:
        for kind in wanted:
            sys.stdout.write(outputs[kind])
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.specfile).stem
    for kind in wanted:
        path = out / f"{stem}.{'txt' if kind == 'text' else 'csv'}"
        path.write_text(outputs[kind])
        log.info("wrote %s", path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psilab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run every analysis in a spec file")
    r.add_argument("specfile")
    r.add_argument("--out", metavar="DIR", help="write <stem>.txt / <stem>.csv here instead of stdout")
    r.add_argument("--format", choices=("text", "csv", "both"), default="text")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="parse a spec file without running it")
    c.add_argument("specfile")
    c.add_argument("--print", action="store_true", help="print the canonical form")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except SpecError as e:
        print(f"spec error: {e}", file=sys.stderr)
        return 1
    except AnalysisError as e:
        print(f"analysis error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
