"""
fdnorm closure engine - attribute closures, entailment, minimal covers,
candidate keys and projections of F+

F+ itself is never enumerated: every question about it is answered through an
attribute-closure membership test.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Tuple, Union

from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import SizeLimitExceeded
from fd_model import FD, AttributeSet, FDSet, FunctionalDependency, RelationSchema, attr_key

logger = logging.getLogger(__name__)

Dependencies = Union[FDSet, Iterable[FunctionalDependency]]


def _deps(f: Dependencies) -> List[FunctionalDependency]:
    if isinstance(f, FDSet):
        return list(f.fds)
    return list(f)


def attribute_closure(x: Iterable[str], f: Dependencies) -> AttributeSet:
    """
    Least superset of x closed under f

    Args:
        x: starting attributes
        f: dependencies (an FDSet or any iterable of FDs)

    Returns:
        x+ as a frozenset
    """
    closure = set(x)
    pending = _deps(f)
    changed = True
    while changed:
        changed = False
        remaining = []
        for dep in pending:
            if dep.lhs <= closure:
                if not dep.rhs <= closure:
                    closure |= dep.rhs
                    changed = True
            else:
                remaining.append(dep)
        pending = remaining
    return frozenset(closure)


def implies(f: Dependencies, candidate: FunctionalDependency) -> bool:
    """True iff candidate is in F+"""
    return candidate.rhs <= attribute_closure(candidate.lhs, f)


def equivalent(f: Dependencies, g: Dependencies) -> bool:
    """Both sets entail every member of the other"""
    f_list, g_list = _deps(f), _deps(g)
    return all(implies(g_list, d) for d in f_list) and all(implies(f_list, d) for d in g_list)


def minimal_cover(f: Dependencies) -> FDSet:
    """
    Canonical cover: singleton right sides, no extraneous determinant
    attributes, no redundant dependencies. Attributes and dependencies are
    examined in canonical order so the result is deterministic.
    """
    original = _deps(f)
    split = sorted(
        {s for dep in original for s in dep.split() if not s.is_trivial()},
        key=FunctionalDependency.sort_key,
    )

    reduced: List[FunctionalDependency] = []
    for dep in split:
        lhs = set(dep.lhs)
        for a in sorted(dep.lhs):
            if len(lhs) > 1 and dep.rhs <= attribute_closure(lhs - {a}, original):
                lhs.discard(a)
        candidate = FD(lhs, dep.rhs)
        if candidate not in reduced:
            reduced.append(candidate)

    result = sorted(reduced, key=FunctionalDependency.sort_key)
    for dep in list(result):
        others = [d for d in result if d != dep]
        if implies(others, dep):
            result = others
    logger.debug("minimal cover of %d dependencies has %d members", len(original), len(result))
    return FDSet(frozenset(result))


def is_superkey(x: Iterable[str], scope: AttributeSet, f: Dependencies) -> bool:
    return scope <= attribute_closure(x, f)


def _key_order(k: AttributeSet) -> Tuple[int, Tuple[str, ...]]:
    return len(k), attr_key(k)


def candidate_keys(
    scope: AttributeSet, f: Dependencies, limits: AnalysisLimits = DEFAULT_LIMITS
) -> Tuple[AttributeSet, ...]:
    """
    All minimal X ⊆ scope with X+ ⊇ scope

    Attributes not derivable from the rest of the scope seed every key; the
    remaining determinant attributes are searched by increasing size, skipping
    supersets of keys already found.

    Raises:
        SizeLimitExceeded: |scope| above limits.max_key_attrs
    """
    scope = frozenset(scope)
    if not scope:
        raise ValueError("candidate keys of an empty attribute set")
    if len(scope) > limits.max_key_attrs:
        raise SizeLimitExceeded("candidate key search", len(scope), limits.max_key_attrs)

    deps = _deps(f)
    core = frozenset(a for a in scope if a not in attribute_closure(scope - {a}, deps))
    if is_superkey(core, scope, deps):
        return (core,)

    determinants = set()
    for dep in deps:
        determinants |= dep.lhs
    rest = sorted((scope - core) & determinants)

    keys: List[AttributeSet] = []
    for size in range(1, len(rest) + 1):
        for combo in combinations(rest, size):
            x = core | frozenset(combo)
            if any(k <= x for k in keys):
                continue
            if is_superkey(x, scope, deps):
                keys.append(x)
    return tuple(sorted(keys, key=_key_order))


def prime_attributes(
    scope: AttributeSet, f: Dependencies, limits: AnalysisLimits = DEFAULT_LIMITS
) -> AttributeSet:
    result = set()
    for k in candidate_keys(scope, f, limits):
        result |= k
    return frozenset(result)


def build_relation(
    name: str, scope: Iterable[str], f: Dependencies, limits: AnalysisLimits = DEFAULT_LIMITS
) -> RelationSchema:
    """A RelationSchema whose candidate keys are computed under f"""
    scope = frozenset(scope)
    return RelationSchema(name, scope, candidate_keys(scope, f, limits))


@dataclass(frozen=True)
class ProjectedFDSet:
    """A reduced, entailment-equivalent representative of F_i"""
    base: FDSet
    scope: AttributeSet
    fds: FDSet


def project_fds(
    f: FDSet, scope: Iterable[str], limits: AnalysisLimits = DEFAULT_LIMITS
) -> ProjectedFDSet:
    """
    Projection of F+ onto scope

    Every non-empty X ⊆ scope contributes X → (X+ ∩ scope) - X unless that is
    already entailed by the entries kept for smaller determinants.

    Raises:
        SizeLimitExceeded: |scope| above limits.max_projection_attrs
    """
    scope = frozenset(scope)
    if len(scope) > limits.max_projection_attrs:
        raise SizeLimitExceeded("projection", len(scope), limits.max_projection_attrs)

    deps = _deps(f)
    kept: List[FunctionalDependency] = []
    names = sorted(scope)
    for size in range(1, len(names) + 1):
        for combo in combinations(names, size):
            x = frozenset(combo)
            reach = attribute_closure(x, deps) & scope
            if not reach - x:
                continue
            if reach <= attribute_closure(x, kept):
                continue
            kept.append(FD(x, reach - x))
    return ProjectedFDSet(f, scope, FDSet(frozenset(kept)))


def restrict(f: Dependencies, scope: AttributeSet) -> FDSet:
    """Members of f lying entirely inside scope (no derivation)"""
    return FDSet(frozenset(d for d in _deps(f) if d.attributes <= scope))
