#!/usr/bin/env python3
"""
fdnorm CLI - Command-line interface for functional dependency normalization analysis
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from fd_config import load_config
from fd_errors import (
    FDNormError,
    SchemaSyntaxError,
    SchemaValidationError,
    SizeLimitExceeded,
)
from fd_model import render_attrs
from fdnorm_sdk import TARGETS, FDAnalyzer, __version__, is_clean

logger = logging.getLogger("fdnorm")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2
EXIT_SIZE_LIMIT = 3


def _mark(ok: Optional[bool]) -> str:
    if ok is None:
        return "ℹ️ "
    return "✅" if ok else "❌"


class FDNormCLI:
    def __init__(self, args: argparse.Namespace, analyzer: FDAnalyzer):
        self.args = args
        self.analyzer = analyzer

    def emit(self, report: Dict[str, Any], render) -> None:
        if self.args.json:
            print(json.dumps(report, indent=2, ensure_ascii=False))
        else:
            render(report)

    def closure(self) -> Dict[str, Any]:
        report = self.analyzer.closure(self.args.set.replace(",", " "))
        self.emit(report, self.print_closure)
        return report

    def keys(self) -> Dict[str, Any]:
        report = self.analyzer.keys()
        self.emit(report, self.print_keys)
        return report

    def classify(self) -> Dict[str, Any]:
        d = self.analyzer.load_decomposition(self.args.decomposition) if self.args.decomposition else None
        report = self.analyzer.classify(d)
        self.emit(report, self.print_classification)
        return report

    def decompose(self) -> Dict[str, Any]:
        report = self.analyzer.decompose(self.args.target, output=self.args.output)
        self.emit(report, self.print_decompose)
        return report

    def check(self) -> Dict[str, Any]:
        report = self.analyzer.check(self.analyzer.load_decomposition(self.args.decomposition))
        self.emit(report, self.print_check)
        return report

    def diagnose(self) -> Dict[str, Any]:
        report = self.analyzer.diagnose()
        self.emit(report, self.print_diagnosis)
        return report

    # -- human-readable rendering ------------------------------------------

    @staticmethod
    def print_closure(report):
        c = report["closure"]
        print(f"✅ {render_attrs(c['set'])}+ = {render_attrs(c['closure'])}")
        if c["superkey"]:
            print(f"ℹ️  {render_attrs(c['set'])} is a superkey")

    @staticmethod
    def print_keys(report):
        print("📋 Candidate keys:")
        for key in report["candidate_keys"]:
            print(f"  • {render_attrs(key)}")
        print(f"Prime attributes: {render_attrs(report['prime_attributes'])}")

    @staticmethod
    def print_tables(tables: List[Dict[str, Any]]):
        for t in tables:
            keys = ", ".join(render_attrs(k) for k in t["candidate_keys"])
            line = f"  {t['name']}({', '.join(t['attributes'])}) keys: {keys}"
            if t.get("provenance"):
                line += f"  [{t['provenance']}]"
            if t.get("level"):
                line += f"  {t['level']}"
            print(line)

    def print_classification(self, report):
        c = report["classification"]
        for t in c["tables"]:
            self.print_tables([t])
            for w in t["partial_dependencies"]:
                print(f"      partial: {render_attrs(w['part'])} → {w['attribute']}"
                      f" (proper part of key {render_attrs(w['key'])})")
            for w in t["transitive_dependencies"]:
                print(f"      transitive: {render_attrs(w['alpha'])} → {render_attrs(w['beta'])} → {w['attribute']}")
            for w in t["prime_transitive_dependencies"]:
                print(f"      ℹ️  prime target: {render_attrs(w['alpha'])} → {render_attrs(w['beta'])} → {w['attribute']}")
        print(f"{_mark(c['lossless'])} Lossless join")
        print(f"{_mark(c['preserving'])} Dependency preserving")
        for lost in c["lost"]:
            print(f"    {lost} lost")
        clean = c["level"] == "3NF" and c["lossless"] and c["preserving"]
        print(f"{_mark(clean)} Normal form: {c['level']}")
        precision = report.get("precision")
        if precision:
            print(f"{_mark(precision['precise_2nf'])} Precisely 2NF"
                  + (" (trivially, also 3NF)" if precision["trivially_3nf"] else ""))
            for reason in precision["reasons"]:
                print(f"    {reason}")

    def print_decompose(self, report):
        print(f"🔧 Target: {report['target']}")
        case = report.get("case_analysis")
        if case:
            print(f"ℹ️  Case {case['raw_case']} (merged {case['merged_case']}), "
                  f"overlap {render_attrs(case['overlap'])}, residual {render_attrs(case['residual'])}")
        plan = report.get("plan")
        if plan:
            for step in plan["narrative"]:
                print(f"  • {step}")
        d = report["decomposition"]
        if d is None:
            print(f"❌ Impossible: {plan['impossibility']['reason']}")
            witness = plan["witness"]
            if witness:
                print(f"    witness meeting point: {witness['meeting']}")
            return
        print("✅ Decomposition:")
        self.print_tables(d["tables"])
        v = report["verification"]
        print(f"{_mark(v['lossless'])} Lossless join")
        print(f"{_mark(v['preserving'])} Dependency preserving")
        for lost in v["lost"]:
            print(f"    {lost} lost")
        for rejected in report.get("rejected_variants", []):
            print(f"ℹ️  Variant {rejected['variant']} rejected: {'; '.join(rejected['failures'])}")
        if report.get("output"):
            print(f"💾 Decomposition saved to: {report['output']}")

    def print_check(self, report):
        self.print_tables(report["decomposition"]["tables"])
        chase = report["lossless"]
        print(f"{_mark(chase['lossless'])} Lossless join (chase)")
        if self.args.verbose:
            for step in chase["trace"]:
                print(f"    {step}")
        p = report["preservation"]
        print(f"{_mark(p['preserved'])} Dependency preserving")
        for lost in p["lost"]:
            print(f"    {lost} lost")
        oracle = report["instance_oracle"]
        if "join" in oracle:
            join = oracle["join"]
            print(f"ℹ️  Instance (seed {oracle['seed']}): {join['original_size']} tuples, "
                  f"join yields {join['joined_size']}, {join['spurious_count']} spurious")
        else:
            print(f"ℹ️  Instance oracle: {oracle['reason']}")

    @staticmethod
    def print_diagnosis(report):
        verdict = report["verdict"]
        check = verdict["assumption_check"]
        if not check["passed"]:
            print(f"❌ Assumption check failed: {check['reason']}", file=sys.stderr)
            return
        print(f"ℹ️  Key {render_attrs(check['key'])}, components "
              + " | ".join(render_attrs(c) for c in check["components"]))
        for chains in report["chains"].values():
            for chain in chains:
                print(f"  • {' → '.join(render_attrs(n) for n in chain['nodes'])}")
        if verdict["impossible"]:
            w = verdict["witness"]
            chain_a = " → ".join(render_attrs(n) for n in w["chain_a"]["nodes"])
            chain_b = " → ".join(render_attrs(n) for n in w["chain_b"]["nodes"])
            print("❌ Cannot be decomposed precisely into 2NF")
            print(f"    chains ({chain_a}) and ({chain_b}) meet at {w['meeting']}")
            for branch in verdict["proof_branches"]:
                print(f"    {branch}")
        else:
            print("✅ No partially overlapping chains found")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", "-j", action="store_true", help="Output the machine-readable report")
    common.add_argument("--seed", type=int, default=0, help="Instance oracle seed (default: 0)")
    common.add_argument("--max-attrs", type=int, help="Bound for key and projection searches")
    common.add_argument("--config", help="JSON file with analysis limits")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="fdnorm",
        description="fdnorm - Functional dependency normalization analysis",
    )
    parser.add_argument("--version", action="version", version=f"fdnorm {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    closure_parser = subparsers.add_parser("closure", parents=[common], help="Attribute closure of a set")
    closure_parser.add_argument("--set", required=True, help="Attribute names, space or comma separated")
    closure_parser.add_argument("schema", help="Schema file (.fd)")

    keys_parser = subparsers.add_parser("keys", parents=[common], help="Candidate keys")
    keys_parser.add_argument("schema", help="Schema file (.fd)")

    classify_parser = subparsers.add_parser("classify", parents=[common], help="Normal form of Ω or a decomposition")
    classify_parser.add_argument("--decomposition", "-d", help="Decomposition file (.dec)")
    classify_parser.add_argument("schema", help="Schema file (.fd)")

    decompose_parser = subparsers.add_parser("decompose", parents=[common], help="Build a decomposition")
    decompose_parser.add_argument("--target", "-t", required=True, choices=TARGETS)
    decompose_parser.add_argument("--output", "-o", help="Write the decomposition to a .dec file")
    decompose_parser.add_argument("schema", help="Schema file (.fd)")

    check_parser = subparsers.add_parser("check", parents=[common], help="Lossless join and dependency preservation")
    check_parser.add_argument("--decomposition", "-d", required=True, help="Decomposition file (.dec)")
    check_parser.add_argument("schema", help="Schema file (.fd)")

    diagnose_parser = subparsers.add_parser("diagnose", parents=[common], help="Overlapping chain diagnosis")
    diagnose_parser.add_argument("schema", help="Schema file (.fd)")

    return parser


def _report_error(source: str, e: Exception) -> None:
    if isinstance(e, SchemaSyntaxError):
        for issue in e.issues:
            print(f"❌ {source}:{issue.line}:{issue.col}: expected {issue.expected}", file=sys.stderr)
    elif isinstance(e, SchemaValidationError):
        for error in e.errors:
            print(f"❌ {source}: {error}", file=sys.stderr)
    else:
        print(f"❌ {e}", file=sys.stderr)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one fdnorm command

    Returns:
        0 clean, 1 violation or impossibility found, 2 input error, 3 size limit exceeded
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_INPUT_ERROR

    if not args.command:
        parser.print_help()
        return EXIT_INPUT_ERROR

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    source = args.schema
    try:
        limits = load_config(args.config)
        if args.max_attrs:
            limits = limits.with_max_attrs(args.max_attrs)
        logger.debug("limits: %s", limits)
        analyzer = FDAnalyzer.from_file(args.schema, limits, args.seed)
        source = getattr(args, "decomposition", None) or args.schema
        cli = FDNormCLI(args, analyzer)
        report = getattr(cli, args.command)()
    except SizeLimitExceeded as e:
        print(f"❌ Size limit exceeded: {e}", file=sys.stderr)
        return EXIT_SIZE_LIMIT
    except (FDNormError, ValueError) as e:
        _report_error(source, e)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"❌ Cannot read input: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.command == "diagnose" and not report["verdict"]["assumption_check"]["passed"]:
        return EXIT_INPUT_ERROR
    return EXIT_OK if is_clean(report) else EXIT_VIOLATION


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
