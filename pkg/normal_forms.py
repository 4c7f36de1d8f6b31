"""
fdnorm normal forms - partial/transitive dependency witnesses and 1NF/2NF/3NF
classification of single tables and of whole decompositions
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from fd_closure import (
    attribute_closure,
    candidate_keys,
    minimal_cover,
    project_fds,
    restrict,
)
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import SizeLimitExceeded
from fd_model import (
    AttributeSet,
    Decomposition,
    FDSet,
    FunctionalDependency,
    Provenance,
    RelationSchema,
    Schema,
    attr_key,
    render_attrs,
)
from verification import chase_lossless, preservation_check

logger = logging.getLogger(__name__)


class NormalForm(str, Enum):
    FIRST = "1NF"
    SECOND = "2NF"
    THIRD = "3NF"

    @property
    def rank(self) -> int:
        return int(self.value[0])


@dataclass(frozen=True)
class PartialDependencyWitness:
    key: AttributeSet
    part: AttributeSet
    attribute: str

    def __str__(self):
        return f"{render_attrs(self.part)} → {self.attribute} (proper part of key {render_attrs(self.key)})"

    def to_dict(self):
        return {"key": sorted(self.key), "part": sorted(self.part), "attribute": self.attribute}


@dataclass(frozen=True)
class TransitiveDependencyWitness:
    alpha: AttributeSet
    beta: AttributeSet
    attribute: str

    def __str__(self):
        return (
            f"{render_attrs(self.alpha)} → {render_attrs(self.beta)} → {self.attribute}"
            f" ({render_attrs(self.beta)} ↛ {render_attrs(self.alpha)})"
        )

    def to_dict(self):
        return {"alpha": sorted(self.alpha), "beta": sorted(self.beta), "attribute": self.attribute}


@dataclass(frozen=True)
class TableWitnesses:
    relation: str
    attrs: AttributeSet
    candidate_keys: Tuple[AttributeSet, ...]
    level: NormalForm
    partial: Tuple[PartialDependencyWitness, ...] = ()
    transitive: Tuple[TransitiveDependencyWitness, ...] = ()
    prime_transitive: Tuple[TransitiveDependencyWitness, ...] = ()

    def to_dict(self):
        return {
            "name": self.relation,
            "attributes": sorted(self.attrs),
            "candidate_keys": [sorted(k) for k in self.candidate_keys],
            "level": self.level.value,
            "partial_dependencies": [w.to_dict() for w in self.partial],
            "transitive_dependencies": [w.to_dict() for w in self.transitive],
            "prime_transitive_dependencies": [w.to_dict() for w in self.prime_transitive],
        }


@dataclass(frozen=True)
class NormalFormLabel:
    """
    Highest satisfied normal form, with the witnesses that block the next one.

    lossless / preserving are None for a table-local label.
    """
    level: NormalForm
    tables: Tuple[TableWitnesses, ...]
    lossless: Optional[bool] = None
    preserving: Optional[bool] = None
    lost: Tuple[FunctionalDependency, ...] = field(default=())

    @property
    def table_levels(self) -> Dict[str, NormalForm]:
        return {t.relation: t.level for t in self.tables}

    def to_dict(self):
        return {
            "level": self.level.value,
            "lossless": self.lossless,
            "preserving": self.preserving,
            "lost": [str(f) for f in self.lost],
            "tables": [t.to_dict() for t in self.tables],
        }


def _keys_of(rel: RelationSchema, f: FDSet, limits: AnalysisLimits) -> Tuple[AttributeSet, ...]:
    return rel.candidate_keys or candidate_keys(rel.attrs, f, limits)


def partial_dependency_witnesses(
    rel: RelationSchema, f: FDSet, limits: AnalysisLimits = DEFAULT_LIMITS
) -> List[PartialDependencyWitness]:
    """
    Every (key, proper part, non-prime attribute) with part → attribute

    Empty exactly when rel is in 2NF.
    """
    keys = _keys_of(rel, f, limits)
    prime = frozenset().union(*keys)
    non_prime = rel.attrs - prime
    witnesses = []
    for key in keys:
        if len(key) > limits.max_key_attrs:
            raise SizeLimitExceeded("key subset enumeration", len(key), limits.max_key_attrs)
        names = sorted(key)
        for size in range(1, len(names)):
            for combo in combinations(names, size):
                part = frozenset(combo)
                for a in sorted(attribute_closure(part, f) & non_prime):
                    witnesses.append(PartialDependencyWitness(key, part, a))
    return witnesses


def _beta_candidates(rel: RelationSchema, f: FDSet, limits: AnalysisLimits) -> List[AttributeSet]:
    """Determinants of the projected cover, plus the full powerset for narrow tables"""
    if len(rel.attrs) <= limits.max_projection_attrs:
        cover = minimal_cover(project_fds(f, rel.attrs, limits).fds)
    else:
        cover = restrict(minimal_cover(f), rel.attrs)
    betas = {dep.lhs for dep in cover}
    if len(rel.attrs) <= limits.transitive_powerset_width:
        names = sorted(rel.attrs)
        for size in range(1, len(names) + 1):
            betas.update(frozenset(c) for c in combinations(names, size))
    return sorted(betas, key=lambda b: (len(b), attr_key(b)))


def _transitive(
    rel: RelationSchema, f: FDSet, limits: AnalysisLimits, prime_targets: bool
) -> List[TransitiveDependencyWitness]:
    keys = _keys_of(rel, f, limits)
    prime = frozenset().union(*keys)
    betas = _beta_candidates(rel, f, limits)
    witnesses = []
    for alpha in keys:
        alpha_closure = attribute_closure(alpha, f)
        for beta in betas:
            if beta <= alpha or not beta <= alpha_closure:
                continue
            beta_closure = attribute_closure(beta, f)
            if alpha <= beta_closure:
                continue
            for a in sorted((beta_closure & rel.attrs) - alpha - beta):
                if (a in prime) == prime_targets:
                    witnesses.append(TransitiveDependencyWitness(alpha, beta, a))
    return witnesses


def transitive_dependency_witnesses(
    rel: RelationSchema, f: FDSet, limits: AnalysisLimits = DEFAULT_LIMITS
) -> List[TransitiveDependencyWitness]:
    """
    Every key α, determinant β and non-prime A with α → β → A, β ↛ α, β ⊄ α,
    A ∉ α ∪ β, all inside rel. For a 2NF table, empty exactly when it is in 3NF.
    """
    return _transitive(rel, f, limits, prime_targets=False)


def prime_transitive_dependencies(
    rel: RelationSchema, f: FDSet, limits: AnalysisLimits = DEFAULT_LIMITS
) -> List[TransitiveDependencyWitness]:
    """Transitivity whose target is prime: reported, never a 3NF violation"""
    return _transitive(rel, f, limits, prime_targets=True)


def table_witnesses(rel: RelationSchema, f: FDSet, limits: AnalysisLimits = DEFAULT_LIMITS) -> TableWitnesses:
    keys = _keys_of(rel, f, limits)
    rel = replace(rel, candidate_keys=keys)
    partial = tuple(partial_dependency_witnesses(rel, f, limits))
    transitive = tuple(transitive_dependency_witnesses(rel, f, limits))
    prime_notes = tuple(prime_transitive_dependencies(rel, f, limits))
    if partial:
        level = NormalForm.FIRST
    elif transitive:
        level = NormalForm.SECOND
    else:
        level = NormalForm.THIRD
    return TableWitnesses(rel.name, rel.attrs, keys, level, partial, transitive, prime_notes)


def classify_table(rel: RelationSchema, f: FDSet, limits: AnalysisLimits = DEFAULT_LIMITS) -> NormalFormLabel:
    """1NF if a partial dependency exists, else 2NF if a transitive one does, else 3NF"""
    witnesses = table_witnesses(rel, f, limits)
    return NormalFormLabel(witnesses.level, (witnesses,))


def classify_database(d: Decomposition, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> NormalFormLabel:
    """
    Lowest table level, demoted to 1NF when the decomposition is lossy or loses
    a dependency; both flags are kept so a report can say which.
    """
    tables = tuple(table_witnesses(rel, schema.fds, limits) for rel in d.relations)
    level = min((t.level for t in tables), key=lambda nf: nf.rank)
    lossless = chase_lossless(d, schema).lossless
    preservation = preservation_check(d, schema)
    if not (lossless and preservation.preserved):
        logger.debug("demoted to 1NF (lossless=%s, preserving=%s)", lossless, preservation.preserved)
        level = NormalForm.FIRST
    return NormalFormLabel(level, tables, lossless, preservation.preserved, preservation.lost)


# ---------------------------------------------------------------------------
# Provenance and the precisely-2NF audit
# ---------------------------------------------------------------------------

TWO_NF_STEPS = (
    Provenance.KEY_FRAGMENT,
    Provenance.PARTIAL_DEPENDENCY_SPLIT,
    Provenance.RESIDUAL_KEY_TABLE,
)


def infer_provenance(rel: RelationSchema, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> Provenance:
    """
    Which rule could have produced a table: it holds a key of Ω (residual key
    table), it is keyed by a proper part of a key of Ω (partial dependency
    split, or key fragment when it is that part alone), or neither (only a
    transitivity-based split yields it).
    """
    global_keys = candidate_keys(schema.universe, schema.fds, limits)
    if any(k <= rel.attrs for k in global_keys):
        return Provenance.RESIDUAL_KEY_TABLE
    for table_key in _keys_of(rel, schema.fds, limits):
        if any(table_key < k for k in global_keys):
            if rel.attrs == table_key:
                return Provenance.KEY_FRAGMENT
            return Provenance.PARTIAL_DEPENDENCY_SPLIT
    return Provenance.TRANSITIVITY_SPLIT


def with_inferred_provenance(
    d: Decomposition, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS
) -> Decomposition:
    return Decomposition(d.relations, tuple(infer_provenance(r, schema, limits) for r in d.relations))


@dataclass(frozen=True)
class PrecisionAudit:
    precise: bool
    trivially: bool
    label: NormalFormLabel
    transitivity_tables: Tuple[str, ...]
    reasons: Tuple[str, ...]

    def to_dict(self):
        return {
            "precise_2nf": self.precise,
            "trivially_3nf": self.trivially,
            "transitivity_tables": list(self.transitivity_tables),
            "reasons": list(self.reasons),
        }


def audit_precise_2nf(d: Decomposition, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> PrecisionAudit:
    """
    A database is precisely in 2NF when it is in 2NF (lossless and preserving
    included) and every table is explainable by a 2NF-criterion step alone.
    Tags outside those steps (synthesis) are re-derived from table structure.
    """
    label = classify_database(d, schema, limits)
    reasons = []
    if label.lossless is False:
        reasons.append("decomposition is lossy")
    if label.preserving is False:
        reasons.extend(f"{f} lost" for f in label.lost)
    if label.level == NormalForm.FIRST and label.lossless and label.preserving:
        reasons.append("a table has a partial dependency")

    transitivity = []
    for rel, tag in d:
        if tag not in TWO_NF_STEPS:
            tag = infer_provenance(rel, schema, limits)
        if tag == Provenance.TRANSITIVITY_SPLIT:
            transitivity.append(rel.name)
            reasons.append(f"{rel.name} is the product of a transitivity-based split")

    precise = label.level.rank >= 2 and not transitivity
    return PrecisionAudit(precise, precise and label.level == NormalForm.THIRD, label, tuple(transitivity), tuple(reasons))
