"""
fdnorm decomposition - the key-component case analysis, the 2NF template,
3NF synthesis and the precise 2NF planner
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from chain_diagnosis import ChainPair, key_components, theorem1_verdict
from fd_closure import attribute_closure, build_relation, candidate_keys, minimal_cover
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import VariantInapplicable
from fd_model import (
    AttributeSet,
    Decomposition,
    FunctionalDependency,
    Provenance,
    Schema,
    attr_key,
    render_attrs,
)
from normal_forms import NormalForm, audit_precise_2nf, classify_database
from verification import (
    SpuriousDemonstration,
    chase_lossless,
    find_spurious_instance,
    preservation_check,
)

logger = logging.getLogger(__name__)

VARIANTS = ("1-without-R3", "3a", "4a")


@dataclass(frozen=True)
class CaseAnalysis:
    key: AttributeSet
    components: Tuple[AttributeSet, AttributeSet]
    alpha1: AttributeSet
    alpha2: AttributeSet
    raw_case: str
    merged_case: str
    overlap: AttributeSet
    residual: AttributeSet

    @property
    def alpha1_minus(self) -> AttributeSet:
        return self.alpha1 - self.components[0]

    @property
    def alpha2_minus(self) -> AttributeSet:
        return self.alpha2 - self.components[1]

    def to_dict(self):
        return {
            "key": sorted(self.key),
            "components": [sorted(c) for c in self.components],
            "alpha1": sorted(self.alpha1),
            "alpha2": sorted(self.alpha2),
            "raw_case": self.raw_case,
            "merged_case": self.merged_case,
            "overlap": sorted(self.overlap),
            "residual": sorted(self.residual),
        }


def analyze_case(schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> CaseAnalysis:
    """
    Compare the closures of the two key components

    Case 1/2: the closures are disjoint, covering Ω or not. Case 3b/4b: they
    overlap, covering Ω or not (the 3a/4a placements are only built on request
    by reject_illegitimate). Cases 1 and 2 merge into A, 3b and 4b into B.

    Raises:
        AssumptionViolated: see chain_diagnosis.key_components
    """
    key, first, second = key_components(schema, limits)
    alpha1 = attribute_closure(first, schema.fds)
    alpha2 = attribute_closure(second, schema.fds)
    overlap = alpha1 & alpha2
    residual = schema.universe - (alpha1 | alpha2)
    if not overlap:
        raw_case = "1" if not residual else "2"
    else:
        raw_case = "3b" if not residual else "4b"
    merged_case = "A" if not overlap else "B"
    logger.debug("case %s (merged %s), overlap %s, residual %s",
                 raw_case, merged_case, render_attrs(overlap), render_attrs(residual))
    return CaseAnalysis(key, (first, second), alpha1, alpha2, raw_case, merged_case, overlap, residual)


def _assemble(
    schema: Schema,
    tables: List[Tuple[AttributeSet, Provenance]],
    limits: AnalysisLimits,
    check: bool = True,
) -> Decomposition:
    relations = tuple(
        build_relation(f"R{i}", attrs, schema.fds, limits) for i, (attrs, _) in enumerate(tables, start=1)
    )
    d = Decomposition(relations, tuple(tag for _, tag in tables)).renumbered()
    return d.check(schema.universe) if check else d


def _component_tag(minus: AttributeSet) -> Provenance:
    return Provenance.PARTIAL_DEPENDENCY_SPLIT if minus else Provenance.KEY_FRAGMENT


def template_tables(analysis: CaseAnalysis) -> List[Tuple[AttributeSet, Provenance]]:
    """R1 = A1 ∪ α1⁻, R2 = A2 ∪ α2⁻ and the key table R3 = key ∪ residual"""
    first, second = analysis.components
    return [
        (first | analysis.alpha1_minus, _component_tag(analysis.alpha1_minus)),
        (second | analysis.alpha2_minus, _component_tag(analysis.alpha2_minus)),
        (analysis.key | analysis.residual, Provenance.RESIDUAL_KEY_TABLE),
    ]


def decompose_2nf(schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> Decomposition:
    """
    Case A/B template; the key table is emitted even when the residual is empty

    Raises:
        AssumptionViolated: propagated from analyze_case
    """
    analysis = analyze_case(schema, limits)
    return _assemble(schema, template_tables(analysis), limits)


@dataclass(frozen=True)
class RejectionReport:
    variant: str
    decomposition: Decomposition
    lossless: bool
    lost: Tuple[FunctionalDependency, ...]
    missing_attributes: Tuple[str, ...]
    spurious: Optional[SpuriousDemonstration] = None

    @property
    def failures(self) -> List[str]:
        result = []
        if not self.lossless:
            result.append("lossy")
        result.extend(f"{f} lost" for f in self.lost)
        if self.missing_attributes:
            result.append("attributes missing: " + ", ".join(self.missing_attributes))
        return result

    def to_dict(self):
        return {
            "variant": self.variant,
            "lossless": self.lossless,
            "lost": [str(f) for f in self.lost],
            "missing_attributes": list(self.missing_attributes),
            "spurious": self.spurious.to_dict() if self.spurious else None,
        }


def reject_illegitimate(
    schema: Schema, variant: str, seed: int = 0, limits: AnalysisLimits = DEFAULT_LIMITS
) -> RejectionReport:
    """
    Build one of the placements the case analysis rules out and show why it fails

    Args:
        schema: single-key schema
        variant: '1-without-R3' (disjoint closures covering Ω, no key table),
            '3a' (overlap kept only in R1, no key table, closures cover Ω) or
            '4a' (overlap kept only in R1, with the key table)
        seed: first seed tried when searching for a spurious-tuple instance

    Returns:
        RejectionReport naming every failed property

    Raises:
        VariantInapplicable: the schema's case does not admit the variant
        AssumptionViolated: propagated from analyze_case
    """
    if variant not in VARIANTS:
        raise VariantInapplicable(f"unknown variant '{variant}' (expected one of {', '.join(VARIANTS)})")
    analysis = analyze_case(schema, limits)
    first, second = analysis.components
    overlap, residual = analysis.overlap, analysis.residual

    if variant == "1-without-R3":
        if overlap or residual:
            raise VariantInapplicable(f"variant 1-without-R3 needs case 1, schema is case {analysis.raw_case}")
        tables = template_tables(analysis)[:2]
    else:
        if not overlap:
            raise VariantInapplicable(f"variant {variant} needs overlapping closures, overlap is empty")
        if variant == "3a" and residual:
            raise VariantInapplicable(f"variant 3a needs α1 ∪ α2 = Ω, residual is {render_attrs(residual)}")
        if variant == "4a" and not residual:
            raise VariantInapplicable("variant 4a needs a non-empty residual")
        second_minus = analysis.alpha2_minus - analysis.alpha1
        tables = [
            (first | analysis.alpha1_minus, _component_tag(analysis.alpha1_minus)),
            (second | second_minus, _component_tag(second_minus)),
        ]
        if variant == "4a":
            tables.append((analysis.key | residual, Provenance.RESIDUAL_KEY_TABLE))

    d = _assemble(schema, tables, limits, check=False)
    missing = tuple(sorted(schema.universe - d.attributes))
    lossless = chase_lossless(d, schema).lossless
    lost = preservation_check(d, schema).lost
    spurious = None
    if not lossless and not missing:
        spurious = find_spurious_instance(schema, d, seed=seed, limits=limits)
    logger.debug("variant %s: lossless=%s lost=%d", variant, lossless, len(lost))
    return RejectionReport(variant, d, lossless, lost, missing, spurious)


def synthesize_3nf(schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> Decomposition:
    """
    Minimal-cover synthesis: one table per determinant (with everything it
    determines in the cover), a key table when no table holds a key, subsumed
    tables dropped. Works for any schema.
    """
    groups: Dict[AttributeSet, set] = {}
    for dep in minimal_cover(schema.fds):
        groups.setdefault(dep.lhs, set()).update(dep.rhs)
    tables = {lhs | frozenset(rhs) for lhs, rhs in groups.items()}

    keys = candidate_keys(schema.universe, schema.fds, limits)
    if not any(k <= t for k in keys for t in tables):
        tables.add(keys[0])

    kept = [t for t in tables if not any(t < other for other in tables)]
    kept.sort(key=attr_key)
    return _assemble(schema, [(t, Provenance.SYNTHESIS) for t in kept], limits)


# ---------------------------------------------------------------------------
# Precise 2NF planner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Impossibility:
    reason: str
    lost: Tuple[FunctionalDependency, ...] = ()

    def __str__(self):
        return self.reason


@dataclass(frozen=True)
class PlanStep:
    description: str
    tag: Optional[Provenance] = None

    def __str__(self):
        return f"{self.description} [{self.tag.value}]" if self.tag else self.description


@dataclass(frozen=True)
class Placement:
    """One way of placing the meeting-point attribute, and why it fails"""
    name: str
    decomposition: Decomposition
    lossless: bool
    lost: Tuple[FunctionalDependency, ...]
    transitivity_tables: Tuple[str, ...]

    @property
    def failure(self) -> str:
        if self.lost:
            return ", ".join(str(f) for f in self.lost) + " lost"
        if self.transitivity_tables:
            return f"{', '.join(self.transitivity_tables)} is a 3NF decomposition step"
        if not self.lossless:
            return "lossy"
        return "none"


@dataclass(frozen=True)
class PlanOutcome:
    result: Union[Decomposition, Impossibility]
    impossibility_witness: Optional[ChainPair] = None
    narrative: Tuple[PlanStep, ...] = ()
    placements: Tuple[Placement, ...] = field(default=())
    also_3nf: bool = False

    @property
    def succeeded(self) -> bool:
        return isinstance(self.result, Decomposition)


def _evaluate(name: str, d: Decomposition, schema: Schema, limits: AnalysisLimits) -> Placement:
    audit = audit_precise_2nf(d, schema, limits)
    return Placement(
        name,
        d,
        bool(audit.label.lossless),
        audit.label.lost,
        audit.transitivity_tables,
    )


def _meeting_point_placement(
    analysis: CaseAnalysis, witness: ChainPair, schema: Schema, limits: AnalysisLimits
) -> Decomposition:
    tables = [
        (attrs - witness.gamma if tag == Provenance.RESIDUAL_KEY_TABLE else attrs, tag)
        for attrs, tag in template_tables(analysis)
    ]
    tables.append((witness.meeting.lhs | witness.gamma, Provenance.TRANSITIVITY_SPLIT))
    return _assemble(schema, tables, limits)


def plan_precise_2nf(schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> PlanOutcome:
    """
    Decompose precisely into 2NF, or explain why no such decomposition exists

    The template only ever takes 2NF-criterion steps. When it keeps every
    dependency it is returned, whatever the chain diagnosis reports. Otherwise
    the result is an Impossibility: with a
    chain pair witness both placements of the meeting-point attribute are
    built and reported, without one the lost dependencies are reported.

    Raises:
        AssumptionViolated: propagated from analyze_case
    """
    analysis = analyze_case(schema, limits)
    first, second = analysis.components
    steps = [
        PlanStep(f"case {analysis.raw_case} (merged {analysis.merged_case}), key {render_attrs(analysis.key)}"),
        PlanStep(f"{render_attrs(first | analysis.alpha1_minus)} keyed by {render_attrs(first)}",
                 _component_tag(analysis.alpha1_minus)),
        PlanStep(f"{render_attrs(second | analysis.alpha2_minus)} keyed by {render_attrs(second)}",
                 _component_tag(analysis.alpha2_minus)),
        PlanStep(f"{render_attrs(analysis.key | analysis.residual)} keyed by {render_attrs(analysis.key)}",
                 Provenance.RESIDUAL_KEY_TABLE),
    ]

    template = _assemble(schema, template_tables(analysis), limits)
    verdict = theorem1_verdict(schema, limits)
    key_table = _evaluate("key-table", template, schema, limits)

    if key_table.failure == "none":
        if verdict.witness is not None:
            logger.debug("template keeps the meeting point of %s", verdict.witness)
            steps.append(PlanStep(f"the template keeps {verdict.witness.meeting}"))
        label = classify_database(template, schema, limits)
        if label.level == NormalForm.FIRST:
            partial = [str(w) for t in label.tables for w in t.partial]
            steps.append(PlanStep("a component table keeps a partial dependency: " + "; ".join(partial)))
            return PlanOutcome(Impossibility("the 2NF template is not in 2NF"), None, tuple(steps))
        also_3nf = label.level == NormalForm.THIRD
        if also_3nf:
            steps.append(PlanStep("no transitivity is left: also in 3NF, precisely 2NF in the trivial manner"))
        return PlanOutcome(template, None, tuple(steps), (key_table,), also_3nf)

    placements = [key_table]
    if verdict.witness is not None:
        witness = verdict.witness
        steps.append(PlanStep(f"overlapping chains {witness}"))
        meeting = _meeting_point_placement(analysis, witness, schema, limits)
        placements.append(_evaluate("meeting-point", meeting, schema, limits))
        reason = f"{render_attrs(witness.gamma)} has full dependence on both {render_attrs(analysis.key)} and {render_attrs(witness.meeting.lhs)}"
    else:
        reason = "the 2NF template loses " + ", ".join(str(f) for f in key_table.lost)
        steps.append(PlanStep("no chain pair found; the lost dependencies have no 2NF-criterion placement"))

    for placement in placements:
        steps.append(PlanStep(f"{placement.name} placement fails: {placement.failure}"))
        logger.debug("placement %s: %s", placement.name, placement.failure)
    return PlanOutcome(Impossibility(reason, key_table.lost), verdict.witness, tuple(steps), tuple(placements))
