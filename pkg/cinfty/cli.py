"""
`cinfty-lab`: run verification suites and export the combinatorial objects.

    cinfty-lab verify <suite> [--fixture F] [--arity K] [--n N] [--degree-bound D] [--out PATH] [--format json|text]
    cinfty-lab export <object> [--fixture F] [--arity K] [--n N] [--out PATH]
    cinfty-lab list-fixtures

Exit codes: 0 all certificates verified, 1 a certificate failed or a construction broke,
2 bad usage, a suite or export the fixture does not carry included.  Only `verify all`
records unsupported suites, as skipped certificates.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from cinfty.config import ExportObject, RunConfig, Suite, get_settings
from cinfty.core import AlgebraError, ConstructionError
from cinfty.cumulants import cumulant_expansion
from cinfty.fixtures import list_fixtures, transfer_fixture
from cinfty.partitions import build_cumulant_complex, build_refinement_graph
from cinfty.report import certificates_to_json, certificates_to_text, envelope
from cinfty.suites import run_suite

logger = logging.getLogger(__name__)


def _echo(line: str) -> None:
    print(line, file=sys.stderr)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fixture", default=None, help="interval, delta2, circle, subdivided or battery")
    parser.add_argument("--arity", type=int, default=None, help="highest arity of transferred operations")
    parser.add_argument("--n", type=int, default=None, help="highest cumulant / complex index")
    parser.add_argument("--degree-bound", type=int, default=None, help="polynomial degree bound of test forms")
    parser.add_argument("--out", type=Path, default=None, help="write the result here instead of stdout")
    parser.add_argument("--format", choices=["json", "text"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cinfty-lab", description="Exact checks of C∞ transfer and cumulant homotopies.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite and print certificates")
    verify.add_argument("suite", choices=[s.value for s in Suite])
    _add_run_options(verify)

    export = sub.add_parser("export", help="export G_n, c_n, a transferred structure or a cumulant expansion")
    export.add_argument("object", choices=[o.value for o in ExportObject])
    _add_run_options(export)

    sub.add_parser("list-fixtures", help="list the named fixtures")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_settings(
        fixture=args.fixture,
        arity=args.arity,
        n=args.n,
        degree_bound=args.degree_bound,
        out=args.out,
        format=args.format,
    )


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    _echo(f"✓ wrote {out}")


def _dump(kind: str, payload) -> str:
    schema = get_settings().SCHEMA_VERSION
    return json.dumps(envelope(kind, payload, schema), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def cmd_verify(suite: str, config: RunConfig) -> int:
    certificates = run_suite(suite, config, echo=_echo)
    if config.format == "text":
        text = certificates_to_text(certificates)
    else:
        text = certificates_to_json(certificates, get_settings().SCHEMA_VERSION)
    _emit(text, config.out)
    skipped = [c.statement for c in certificates if c.status == "skipped"]
    if skipped:
        _echo(f"- {config.fixture.value} does not carry: {', '.join(skipped)}")
    failed = [c for c in certificates if c.status == "failed"]
    if failed:
        _echo(f"! {len(failed)} of {len(certificates)} certificates failed")
        return 1
    return 0


def cmd_export(obj: str, config: RunConfig) -> int:
    obj = ExportObject(obj)
    if obj is ExportObject.GN:
        text = build_refinement_graph(config.n).to_dot()
    elif obj is ExportObject.CN:
        text = _dump("cn", build_cumulant_complex(config.n).to_json())
    elif obj is ExportObject.TRANSFERRED:
        text = _dump("transferred", transfer_fixture(config.fixture, config.arity).structure.to_json())
    else:
        text = _dump("cumulant", cumulant_expansion(config.n))
    _emit(text, config.out)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-fixtures":
        for fixture in list_fixtures():
            print(f"{fixture['name']:<12} {fixture['description']}")
        return 0

    try:
        config = _run_config(args)
    except ValidationError as e:
        _echo(f"! Invalid options: {e.errors()[0]['msg']}")
        return 2

    try:
        if args.command == "verify":
            return cmd_verify(args.suite, config)
        return cmd_export(args.object, config)
    except AlgebraError as e:
        _echo(f"! {e}")
        return 2
    except ConstructionError as e:
        _echo(f"! Error: {e}")
        if e.report is not None:
            _echo(e.report.model_dump_json() if hasattr(e.report, "model_dump_json") else str(e.report))
        return 1


if __name__ == "__main__":
    sys.exit(main())
