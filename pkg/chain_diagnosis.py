"""
fdnorm chain diagnosis - transitive chains rooted at the key components,
partially overlapping chain pairs and the impossibility verdict for a
precise 2NF decomposition
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from fd_closure import attribute_closure, candidate_keys, implies, minimal_cover
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import AssumptionViolated, SizeLimitExceeded
from fd_model import (
    FD,
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
from verification import restricted_closure

logger = logging.getLogger(__name__)

Path = Tuple[AttributeSet, ...]


# ---------------------------------------------------------------------------
# Key structure
# ---------------------------------------------------------------------------

def key_components(
    schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS
) -> Tuple[AttributeSet, AttributeSet, AttributeSet]:
    """
    Split the single candidate key into its two components

    A two-attribute key splits into its attributes. A wider key is split by
    grouping key attributes that appear together in a minimal-cover determinant
    (partial determinants only); exactly two groups must result.

    Returns:
        (key, first component, second component), components in canonical order

    Raises:
        AssumptionViolated: several keys, a one-attribute key, a key that does
            not split in two, or a component determining all of Ω
    """
    keys = candidate_keys(schema.universe, schema.fds, limits)
    if len(keys) != 1:
        raise AssumptionViolated(
            "multiple candidate keys", ", ".join(render_attrs(k) for k in keys)
        )
    key = keys[0]
    if len(key) < 2:
        raise AssumptionViolated("key has a single attribute", render_attrs(key))

    if len(key) == 2:
        first, second = sorted(key)
        components = [frozenset([first]), frozenset([second])]
    else:
        graph = nx.Graph()
        graph.add_nodes_from(sorted(key))
        for dep in minimal_cover(schema.fds):
            part = sorted(dep.lhs & key)
            if 2 <= len(part) < len(key):
                nx.add_path(graph, part)
        components = sorted((frozenset(c) for c in nx.connected_components(graph)), key=attr_key)
        if len(components) != 2:
            raise AssumptionViolated(
                "key does not split into two components",
                " | ".join(render_attrs(c) for c in components),
            )

    for component in components:
        if schema.universe <= attribute_closure(component, schema.fds):
            raise AssumptionViolated("key component determines every attribute", render_attrs(component))
    logger.debug("key %s splits into %s", render_attrs(key), " | ".join(render_attrs(c) for c in components))
    return key, components[0], components[1]


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitiveChain:
    nodes: Path
    links: Tuple[FunctionalDependency, ...]

    @classmethod
    def along(cls, nodes: Sequence[AttributeSet]) -> "TransitiveChain":
        nodes = tuple(frozenset(n) for n in nodes)
        return cls(nodes, tuple(FD(a, b) for a, b in zip(nodes, nodes[1:])))

    @property
    def last(self) -> AttributeSet:
        return self.nodes[-1]

    @property
    def attributes(self) -> AttributeSet:
        return frozenset().union(*self.nodes)

    def sort_key(self):
        return tuple(attr_key(n) for n in self.nodes)

    def __str__(self):
        return " → ".join(render_attrs(n) for n in self.nodes)

    def to_dict(self):
        return {"nodes": [sorted(n) for n in self.nodes], "links": [str(l) for l in self.links]}


@dataclass(frozen=True)
class ChainPair:
    chain_a: TransitiveChain
    chain_b: TransitiveChain
    meeting: FunctionalDependency
    gamma: AttributeSet

    def sort_key(self):
        return self.chain_a.sort_key(), self.chain_b.sort_key(), attr_key(self.gamma)

    def __str__(self):
        return f"({self.chain_a}) and ({self.chain_b}) meeting at {self.meeting}"

    def to_dict(self):
        return {
            "chain_a": self.chain_a.to_dict(),
            "chain_b": self.chain_b.to_dict(),
            "meeting": str(self.meeting),
            "gamma": sorted(self.gamma),
        }


class _ChainSearch:
    """
    Depth-first enumeration of disjoint node paths

    Default vocabulary: singletons and the non-empty subsets of minimal-cover
    determinants, a node stepping to subsets of what cover dependencies with a
    determinant inside it yield directly. Exhaustive vocabulary: every non-empty
    subset, stepping along any implied dependency.
    """

    def __init__(self, schema: Schema, limits: AnalysisLimits, exhaustive: bool = False):
        self.schema = schema
        self.limits = limits
        self.exhaustive = exhaustive
        self.cover = list(minimal_cover(schema.fds))
        self.visited = 0

        names = sorted(schema.universe)
        vocabulary = {frozenset([a]) for a in names}
        if exhaustive:
            if len(names) > limits.powerset_chain_width:
                raise SizeLimitExceeded("exhaustive chain vocabulary", len(names), limits.powerset_chain_width)
            for size in range(2, len(names) + 1):
                vocabulary.update(frozenset(c) for c in combinations(names, size))
        else:
            for dep in self.cover:
                lhs = sorted(dep.lhs)
                for size in range(2, len(lhs) + 1):
                    vocabulary.update(frozenset(c) for c in combinations(lhs, size))
        self.vocabulary = sorted(vocabulary, key=lambda n: (attr_key(n), len(n)))
        self._reach: Dict[AttributeSet, AttributeSet] = {}

    def reach(self, node: AttributeSet) -> AttributeSet:
        if node not in self._reach:
            if self.exhaustive:
                gained = attribute_closure(node, self.cover)
            else:
                gained = frozenset().union(*(d.rhs for d in self.cover if d.lhs <= node))
            self._reach[node] = gained - node
        return self._reach[node]

    def successors(self, path: Path, used: AttributeSet) -> List[AttributeSet]:
        reach = self.reach(path[-1])
        return [n for n in self.vocabulary if n <= reach and not n & used]

    def paths(self, origin: AttributeSet) -> Iterator[Tuple[Path, bool]]:
        """Every path of two or more nodes from origin, flagged when it cannot be extended"""
        stack: List[Tuple[Path, AttributeSet]] = [((origin,), origin)]
        while stack:
            path, used = stack.pop()
            self.visited += 1
            if self.visited > self.limits.max_chain_paths:
                raise SizeLimitExceeded("chain enumeration", self.visited, self.limits.max_chain_paths)
            nexts = self.successors(path, used)
            if len(path) >= 2:
                yield path, not nexts
            for node in reversed(nexts):
                stack.append((path + (node,), used | node))


def find_chains(
    schema: Schema,
    origin: AttributeSet,
    limits: AnalysisLimits = DEFAULT_LIMITS,
    exhaustive: bool = False,
) -> List[TransitiveChain]:
    """
    Maximal transitive chains starting at origin, in canonical order

    Raises:
        ValueError: origin is empty or not inside the universe
        SizeLimitExceeded: more than limits.max_chain_paths paths explored
    """
    origin = frozenset(origin)
    if not origin or not origin <= schema.universe:
        raise ValueError(f"chain origin {render_attrs(origin)} is not a subset of the universe")
    search = _ChainSearch(schema, limits, exhaustive)
    chains = [TransitiveChain.along(p) for p, maximal in search.paths(origin) if maximal]
    return sorted(chains, key=TransitiveChain.sort_key)


def pair_problems(pair: ChainPair, f: FDSet) -> List[str]:
    """
    Re-check every clause of a chain pair from scratch; empty when it is valid
    """
    problems = []
    for chain in (pair.chain_a, pair.chain_b):
        if len(chain.nodes) < 2:
            problems.append(f"chain {chain} has fewer than two nodes")
        for link in chain.links:
            if not implies(f, link):
                problems.append(f"link {link} is not implied")
    blocks = list(pair.chain_a.nodes) + list(pair.chain_b.nodes) + [pair.gamma]
    for a, b in combinations(blocks, 2):
        if a & b:
            problems.append(f"{render_attrs(a)} and {render_attrs(b)} overlap")
    if pair.meeting.lhs != pair.chain_a.last | pair.chain_b.last or pair.meeting.rhs != pair.gamma:
        problems.append(f"meeting point {pair.meeting} does not join the chain ends")
    if not implies(f, pair.meeting):
        problems.append(f"meeting point {pair.meeting} is not implied")
    for chain in (pair.chain_a, pair.chain_b):
        origin = chain.nodes[0]
        if pair.meeting.lhs <= attribute_closure(origin, f):
            problems.append(f"{render_attrs(pair.meeting.lhs)} lies inside the closure of {render_attrs(origin)}")
    lhs = sorted(pair.meeting.lhs)
    for size in range(1, len(lhs)):
        for delta in combinations(lhs, size):
            if pair.gamma <= attribute_closure(delta, f):
                problems.append(f"{render_attrs(delta)} → {render_attrs(pair.gamma)} already holds")
    return problems


def _component_tables(schema: Schema, first: AttributeSet, second: AttributeSet) -> Decomposition:
    """The scopes the 2NF template gives the components and the key: α1, α2 and key ∪ residual"""
    alpha1 = attribute_closure(first, schema.fds)
    alpha2 = attribute_closure(second, schema.fds)
    scopes = (alpha1, alpha2, first | second | (schema.universe - alpha1 - alpha2))
    return Decomposition(
        tuple(RelationSchema(f"R{i}", s) for i, s in enumerate(scopes, start=1)),
        (Provenance.PARTIAL_DEPENDENCY_SPLIT, Provenance.PARTIAL_DEPENDENCY_SPLIT, Provenance.RESIDUAL_KEY_TABLE),
    )


def _pairs_between(
    schema: Schema, first: AttributeSet, second: AttributeSet, search: _ChainSearch
) -> List[ChainPair]:
    paths_a = [p for p, _ in search.paths(first)]
    paths_b = [p for p, _ in search.paths(second)]
    tables = _component_tables(schema, first, second)
    sides = (tables.relations[0].attrs, tables.relations[1].attrs)
    found = set()
    for a in paths_a:
        used_a = frozenset().union(*a)
        for b in paths_b:
            used_b = frozenset().union(*b)
            if used_a & used_b:
                continue
            meeting = a[-1] | b[-1]
            # a meeting point inside one component's closure stays in that component's table
            if any(meeting <= side for side in sides):
                continue
            reachable = attribute_closure(meeting, schema.fds) - used_a - used_b
            if not reachable:
                continue
            partial = frozenset().union(
                *(
                    attribute_closure(delta, schema.fds)
                    for size in range(1, len(meeting))
                    for delta in combinations(sorted(meeting), size)
                )
            )
            kept = restricted_closure(meeting, tables, schema.fds)
            for gamma in sorted(reachable - partial - kept):
                found.add(
                    ChainPair(
                        TransitiveChain.along(a),
                        TransitiveChain.along(b),
                        FD(meeting, {gamma}),
                        frozenset([gamma]),
                    )
                )
    return sorted(found, key=ChainPair.sort_key)


def find_overlapping_pairs(
    schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS, exhaustive: bool = False
) -> List[ChainPair]:
    """
    All partially overlapping chain pairs rooted at the two key components

    Chain prefixes of two or more nodes are paired across the components; a
    meeting point is kept only for attributes that the union of the chain ends
    determines and no non-empty proper part of it does. The union of the ends
    must not fall inside the closure of either component, and the tables the
    2NF template builds (α1, α2, key ∪ residual) must not already preserve
    the meeting point.

    Raises:
        AssumptionViolated: key structure outside the single two-component key
        SizeLimitExceeded: chain enumeration past its bound
    """
    _, first, second = key_components(schema, limits)
    search = _ChainSearch(schema, limits, exhaustive)
    pairs = _pairs_between(schema, first, second, search)
    logger.debug("%d overlapping chain pairs after %d paths", len(pairs), search.visited)
    return pairs


# ---------------------------------------------------------------------------
# Verdict
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionCheck:
    single_table: bool
    single_key: bool
    key: Optional[AttributeSet] = None
    components: Tuple[AttributeSet, ...] = ()
    reason: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.single_table and self.single_key and self.reason is None

    def to_dict(self):
        return {
            "passed": self.passed,
            "single_table": self.single_table,
            "single_key": self.single_key,
            "key": sorted(self.key) if self.key is not None else None,
            "components": [sorted(c) for c in self.components],
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Theorem1Verdict:
    """
    impossible means a witness was found; not impossible only means none was,
    since a chain pair is sufficient but not necessary for impossibility.
    """
    impossible: bool
    witness: Optional[ChainPair]
    assumption_check: AssumptionCheck
    pairs: Tuple[ChainPair, ...] = ()
    proof_branches: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            "impossible": self.impossible,
            "assumption_check": self.assumption_check.to_dict(),
            "witness": self.witness.to_dict() if self.witness else None,
            "pair_count": len(self.pairs),
            "proof_branches": list(self.proof_branches),
        }


def proof_branches(pair: ChainPair) -> Tuple[str, ...]:
    """The two ways γ can be placed, and why each fails"""
    gamma = render_attrs(pair.gamma)
    ends = render_attrs(pair.meeting.lhs)
    return (
        f"{gamma} kept with the key: {pair.meeting} is lost",
        f"{gamma} placed with {ends}: a decomposition based on transitivity took place",
    )


def theorem1_verdict(schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS) -> Theorem1Verdict:
    """
    Decide whether the schema carries a witness against any precise 2NF
    decomposition

    A failed assumption is recorded on the verdict (impossible stays false)
    rather than raised.
    """
    try:
        key, first, second = key_components(schema, limits)
    except AssumptionViolated as e:
        logger.info("assumption check failed: %s", e)
        single_key = e.reason != "multiple candidate keys"
        return Theorem1Verdict(False, None, AssumptionCheck(True, single_key, reason=str(e)))

    check = AssumptionCheck(True, True, key, (first, second))
    pairs = find_overlapping_pairs(schema, limits)
    if not pairs:
        return Theorem1Verdict(False, None, check)
    witness = pairs[0]
    return Theorem1Verdict(True, witness, check, tuple(pairs), proof_branches(witness))
