#!/usr/bin/env python3
"""
fdnorm SDK - Python API for programmatic normalization analysis

Every method returns a plain dict in the report format documented in
docs/REPORT_FORMAT.md; the command line renders the same dicts.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from chain_diagnosis import find_chains, theorem1_verdict
from decomposition import (
    VARIANTS,
    analyze_case,
    decompose_2nf,
    plan_precise_2nf,
    reject_illegitimate,
    synthesize_3nf,
)
from fd_closure import attribute_closure, build_relation, candidate_keys, minimal_cover, prime_attributes
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import CyclicCover, VariantInapplicable
from fd_model import Decomposition, Schema, attrs
from fd_parser import load_decomposition, load_schema, parse_schema_file, render_decomposition
from normal_forms import NormalForm, audit_precise_2nf, classify_table
from verification import (
    chase_lossless,
    find_spurious_instance,
    generate_instance,
    instance_join_test,
    preservation_check,
)

__version__ = "0.1.0"

logger = logging.getLogger(__name__)

TARGETS = ("2nf", "3nf", "precise2nf")


class FDAnalyzer:
    """Normalization analysis of one schema"""

    def __init__(self, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS, seed: int = 0):
        """
        Initialize the analyzer

        Args:
            schema: validated schema (see fd_parser.parse_schema_file)
            limits: size bounds for the exponential searches
            seed: first seed of the instance oracle
        """
        self.schema = schema
        self.limits = limits
        self.seed = seed

    @classmethod
    def from_file(cls, path: Union[str, Path], limits: AnalysisLimits = DEFAULT_LIMITS, seed: int = 0) -> "FDAnalyzer":
        return cls(load_schema(path).schema, limits, seed)

    @classmethod
    def from_text(cls, text: str, limits: AnalysisLimits = DEFAULT_LIMITS, seed: int = 0) -> "FDAnalyzer":
        return cls(parse_schema_file(text).schema, limits, seed)

    def load_decomposition(self, path: Union[str, Path]) -> Decomposition:
        return load_decomposition(path, self.schema, self.limits)

    def _envelope(self, command: str, **body: Any) -> Dict[str, Any]:
        report = {
            "tool": "fdnorm",
            "version": __version__,
            "command": command,
            "seed": self.seed,
            "schema": {
                "attributes": sorted(self.schema.universe),
                "fds": [str(f) for f in self.schema.fds],
                "minimal_cover": [str(f) for f in minimal_cover(self.schema.fds)],
            },
        }
        report.update(body)
        return report

    def closure(self, names: Union[str, Iterable[str]]) -> Dict[str, Any]:
        """
        Attribute closure of a set

        Raises:
            ValueError: names outside the schema's universe
        """
        x = attrs(names)
        unknown = sorted(x - self.schema.universe)
        if unknown:
            raise ValueError(f"unknown attributes: {', '.join(unknown)}")
        closed = attribute_closure(x, self.schema.fds)
        return self._envelope(
            "closure",
            closure={"set": sorted(x), "closure": sorted(closed), "superkey": self.schema.universe <= closed},
        )

    def keys(self) -> Dict[str, Any]:
        keys = candidate_keys(self.schema.universe, self.schema.fds, self.limits)
        prime = prime_attributes(self.schema.universe, self.schema.fds, self.limits)
        return self._envelope(
            "keys",
            candidate_keys=[sorted(k) for k in keys],
            prime_attributes=sorted(prime),
        )

    def classify(self, decomposition: Optional[Decomposition] = None) -> Dict[str, Any]:
        """
        Normal form of the single table Ω, or of a decomposition

        The label is 3NF/2NF/1NF; a decomposition is also checked for lossless
        join, dependency preservation and precise 2NF.
        """
        if decomposition is None:
            rel = build_relation("R_Omega", self.schema.universe, self.schema.fds, self.limits)
            label = classify_table(rel, self.schema.fds, self.limits)
            body = label.to_dict()
            body.update(lossless=True, preserving=True)
            return self._envelope("classify", classification=body)

        audit = audit_precise_2nf(decomposition, self.schema, self.limits)
        return self._envelope(
            "classify",
            decomposition=decomposition.to_dict(),
            classification=audit.label.to_dict(),
            precision=audit.to_dict(),
        )

    def check(self, decomposition: Decomposition) -> Dict[str, Any]:
        """Lossless join (chase and instance oracle) and dependency preservation"""
        chase = chase_lossless(decomposition, self.schema)
        preservation = preservation_check(decomposition, self.schema)
        oracle: Dict[str, Any]
        try:
            if chase.lossless:
                inst = generate_instance(self.schema, 3, self.seed, self.limits)
                oracle = {"seed": self.seed, "instance": inst.to_dict(),
                          "join": instance_join_test(inst, decomposition).to_dict()}
            else:
                demo = find_spurious_instance(self.schema, decomposition, self.seed, limits=self.limits)
                oracle = demo.to_dict() if demo else {"seed": None, "reason": "no spurious tuple found"}
        except CyclicCover as e:
            logger.warning("instance oracle skipped: %s", e)
            oracle = {"seed": None, "reason": str(e)}
        return self._envelope(
            "check",
            decomposition=decomposition.to_dict(),
            lossless=chase.to_dict(),
            preservation=preservation.to_dict(),
            instance_oracle=oracle,
        )

    def decompose(self, target: str, output: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
        """
        Build a decomposition

        Args:
            target: '2nf' (case template), '3nf' (synthesis) or 'precise2nf' (planner)
            output: optional .dec file the emitted decomposition is written to

        Returns:
            report dict; 'decomposition' is None when the planner proves impossibility

        Raises:
            ValueError: unknown target
            AssumptionViolated: the 2NF targets need a single two-component key
        """
        if target not in TARGETS:
            raise ValueError(f"unknown target '{target}' (expected one of {', '.join(TARGETS)})")

        body: Dict[str, Any] = {"target": target}
        d: Optional[Decomposition]
        if target == "2nf":
            body["case_analysis"] = analyze_case(self.schema, self.limits).to_dict()
            d = decompose_2nf(self.schema, self.limits)
            body["rejected_variants"] = self._rejected_variants()
        elif target == "3nf":
            d = synthesize_3nf(self.schema, self.limits)
        else:
            outcome = plan_precise_2nf(self.schema, self.limits)
            d = outcome.result if outcome.succeeded else None
            body["plan"] = {
                "succeeded": outcome.succeeded,
                "also_3nf": outcome.also_3nf,
                "impossibility": None if outcome.succeeded else {
                    "reason": outcome.result.reason,
                    "lost": [str(f) for f in outcome.result.lost],
                },
                "witness": outcome.impossibility_witness.to_dict() if outcome.impossibility_witness else None,
                "narrative": [str(s) for s in outcome.narrative],
                "placements": [
                    {
                        "name": p.name,
                        "tables": [sorted(t) for t in p.decomposition.tables()],
                        "lossless": p.lossless,
                        "lost": [str(f) for f in p.lost],
                        "transitivity_tables": list(p.transitivity_tables),
                        "failure": p.failure,
                    }
                    for p in outcome.placements
                ],
            }

        body["decomposition"] = d.to_dict() if d is not None else None
        if d is not None:
            preservation = preservation_check(d, self.schema)
            body["verification"] = {
                "lossless": chase_lossless(d, self.schema).lossless,
                "preserving": preservation.preserved,
                "lost": [str(f) for f in preservation.lost],
            }
            if output is not None:
                path = Path(output)
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(render_decomposition(d), encoding="utf-8")
                body["output"] = str(path)
        return self._envelope("decompose", **body)

    def _rejected_variants(self):
        rejected = []
        for variant in VARIANTS:
            try:
                report = reject_illegitimate(self.schema, variant, self.seed, self.limits)
            except VariantInapplicable:
                continue
            rejected.append(dict(report.to_dict(), failures=report.failures))
        return rejected

    def diagnose(self) -> Dict[str, Any]:
        """Chain pair verdict, with the chains found from each key component"""
        verdict = theorem1_verdict(self.schema, self.limits)
        chains = {}
        for component in verdict.assumption_check.components:
            chains[" ".join(sorted(component))] = [
                c.to_dict() for c in find_chains(self.schema, component, self.limits)
            ]
        return self._envelope("diagnose", verdict=verdict.to_dict(), chains=chains)


def is_clean(report: Dict[str, Any]) -> bool:
    """
    True when a report found no violation and no impossibility
    """
    command = report["command"]
    if command == "classify":
        c = report["classification"]
        return c["level"] == NormalForm.THIRD.value and bool(c["lossless"]) and bool(c["preserving"])
    if command == "check":
        return report["lossless"]["lossless"] and report["preservation"]["preserved"]
    if command == "decompose":
        v = report.get("verification")
        return v is not None and v["lossless"] and v["preserving"]
    if command == "diagnose":
        return not report["verdict"]["impossible"]
    return True
