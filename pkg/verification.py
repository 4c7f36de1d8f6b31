"""
fdnorm verification - legitimacy checks for decompositions

Dependency preservation, lossless join (binary rule and chase tableau) and a
tuple-level oracle that materializes instances, projects them onto the tables of
a decomposition and joins them back with pandas.
"""
import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from fd_closure import attribute_closure, minimal_cover
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import CyclicCover
from fd_model import (
    AttributeSet,
    Decomposition,
    FDSet,
    FunctionalDependency,
    RelationSchema,
    Schema,
)

logger = logging.getLogger(__name__)

DISTINGUISHED = "a"


# ---------------------------------------------------------------------------
# Dependency preservation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PreservationReport:
    preserved: bool
    lost: Tuple[FunctionalDependency, ...]

    def to_dict(self):
        return {"preserved": self.preserved, "lost": [str(f) for f in self.lost]}


def restricted_closure(x: Iterable[str], d: Decomposition, f: FDSet) -> AttributeSet:
    """
    Closure of x under the union of the projections of F onto the tables of d,
    computed without materializing any projection: repeatedly close the part of
    the current set that falls inside each table, keeping what stays inside it.
    """
    z = set(x)
    changed = True
    while changed:
        changed = False
        for rel in d.relations:
            gain = attribute_closure(z & rel.attrs, f) & rel.attrs
            if not gain <= z:
                z |= gain
                changed = True
    return frozenset(z)


def preservation_check(d: Decomposition, schema: Schema) -> PreservationReport:
    """Lists every minimal-cover dependency not entailed by the union of the F_i"""
    lost = tuple(
        dep
        for dep in minimal_cover(schema.fds)
        if not dep.rhs <= restricted_closure(dep.lhs, d, schema.fds)
    )
    if lost:
        logger.debug("lost dependencies: %s", ", ".join(str(f) for f in lost))
    return PreservationReport(not lost, lost)


# ---------------------------------------------------------------------------
# Lossless join
# ---------------------------------------------------------------------------

def binary_lossless(r1: RelationSchema, r2: RelationSchema, f: FDSet) -> bool:
    """R1 ⋈ R2 is lossless iff R1 ∩ R2 is a key of R1 or of R2"""
    common = attribute_closure(r1.attrs & r2.attrs, f)
    return r1.attrs <= common or r2.attrs <= common


@dataclass(frozen=True)
class ChaseStep:
    fd: FunctionalDependency
    attribute: str
    rows: Tuple[int, ...]
    replaced: Tuple[str, ...]
    symbol: str

    def __str__(self):
        rows = ", ".join(str(r + 1) for r in self.rows)
        return f"{self.fd} equates {self.attribute} in rows {rows}: {', '.join(self.replaced)} := {self.symbol}"


@dataclass(frozen=True)
class ChaseTableau:
    columns: Tuple[str, ...]
    initial: Tuple[Tuple[str, ...], ...]
    rows: Tuple[Tuple[str, ...], ...]
    trace: Tuple[ChaseStep, ...]

    def render(self) -> List[str]:
        width = max([len(c) for c in self.columns] + [3])
        lines = ["     " + " ".join(c.ljust(width) for c in self.columns)]
        for i, row in enumerate(self.rows, start=1):
            lines.append(f"  {i:>2} " + " ".join(cell.ljust(width) for cell in row))
        return lines


@dataclass(frozen=True)
class ChaseResult:
    lossless: bool
    tableau: ChaseTableau
    distinguished_row: Optional[int]

    def to_dict(self):
        return {
            "lossless": self.lossless,
            "distinguished_row": None if self.distinguished_row is None else self.distinguished_row + 1,
            "columns": list(self.tableau.columns),
            "rows": [list(r) for r in self.tableau.rows],
            "trace": [str(s) for s in self.tableau.trace],
        }


def _pick_symbol(symbols: Iterable[str]) -> str:
    symbols = set(symbols)
    if DISTINGUISHED in symbols:
        return DISTINGUISHED
    return min(symbols, key=lambda s: int(s[1:]))


def chase_lossless(d: Decomposition, schema: Schema) -> ChaseResult:
    """
    Tableau chase over the minimal cover of F

    One row per table, distinguished symbols on the table's own attributes.
    Rows agreeing on a determinant have their dependent symbols equated until
    nothing changes; the decomposition is lossless iff some row ends up fully
    distinguished.
    """
    columns = tuple(sorted(schema.universe))
    index = {c: i for i, c in enumerate(columns)}
    rows = [
        [DISTINGUISHED if c in rel.attrs else f"b{r + 1}" for c in columns]
        for r, rel in enumerate(d.relations)
    ]
    initial = tuple(tuple(r) for r in rows)
    cover = list(minimal_cover(schema.fds))
    trace: List[ChaseStep] = []

    changed = True
    while changed:
        changed = False
        for dep in cover:
            target = next(iter(dep.rhs))
            col = index[target]
            lhs_cols = [index[a] for a in sorted(dep.lhs)]
            groups: Dict[Tuple[str, ...], List[int]] = defaultdict(list)
            for r, row in enumerate(rows):
                groups[tuple(row[c] for c in lhs_cols)].append(r)
            for key in sorted(groups):
                members = groups[key]
                symbols = {rows[r][col] for r in members}
                if len(members) < 2 or len(symbols) < 2:
                    continue
                symbol = _pick_symbol(symbols)
                replaced = tuple(sorted(symbols - {symbol}))
                for row in rows:
                    if row[col] in replaced:
                        row[col] = symbol
                trace.append(ChaseStep(dep, target, tuple(members), replaced, symbol))
                logger.debug("chase: %s", trace[-1])
                changed = True

    winner = next((r for r, row in enumerate(rows) if all(c == DISTINGUISHED for c in row)), None)
    tableau = ChaseTableau(columns, initial, tuple(tuple(r) for r in rows), tuple(trace))
    return ChaseResult(winner is not None, tableau, winner)


# ---------------------------------------------------------------------------
# Instance oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationInstance:
    """Concrete tuples over small non-negative integers, in canonical column order"""
    relation: RelationSchema
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_records(cls, relation: RelationSchema, records: Sequence[Mapping[str, int]]) -> "RelationInstance":
        columns = tuple(sorted(relation.attrs))
        rows = {tuple(int(rec[c]) for c in columns) for rec in records}
        return cls(relation, columns, tuple(sorted(rows)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.rows), columns=list(self.columns))

    def __len__(self):
        return len(self.rows)

    def to_dict(self):
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


@dataclass(frozen=True)
class InstanceViolation:
    fd: FunctionalDependency
    first: Tuple[int, ...]
    second: Tuple[int, ...]


def instance_violations(inst: RelationInstance, f: FDSet) -> List[InstanceViolation]:
    """Scan every pair of tuples for a dependency they break"""
    index = {c: i for i, c in enumerate(inst.columns)}
    found = []
    deps = [d for d in f.singleton_form() if d.attributes <= set(inst.columns)]
    for i, first in enumerate(inst.rows):
        for second in inst.rows[i + 1:]:
            for dep in deps:
                agree = all(first[index[a]] == second[index[a]] for a in dep.lhs)
                target = index[next(iter(dep.rhs))]
                if agree and first[target] != second[target]:
                    found.append(InstanceViolation(dep, first, second))
    return found


def determinant_graph(f: FDSet) -> nx.DiGraph:
    """Edge l → a for every determinant attribute l of a cover dependency with dependent a"""
    graph = nx.DiGraph()
    for dep in minimal_cover(f):
        for a in dep.rhs:
            for l in sorted(dep.lhs):
                graph.add_edge(l, a)
    return graph


def generate_instance(
    schema: Schema,
    n_keys: int,
    seed: int,
    limits: AnalysisLimits = DEFAULT_LIMITS,
) -> RelationInstance:
    """
    Seeded FD-consistent instance over Ω

    The key is the set of attributes no cover dependency determines (unique when
    the determinant graph is acyclic). n_keys distinct key tuples are drawn; every
    dependent attribute is then filled in topological order, one value per class
    of tuples that agree on any of its determinants, so every dependency holds by
    construction.

    Raises:
        CyclicCover: the determinant graph has a cycle
        ValueError: n_keys < 1
    """
    if n_keys < 1:
        raise ValueError("n_keys must be at least 1")
    cover = minimal_cover(schema.fds)
    graph = determinant_graph(schema.fds)
    graph.add_nodes_from(sorted(schema.universe))
    if not nx.is_directed_acyclic_graph(graph):
        raise CyclicCover(nx.find_cycle(graph))

    determined = {a for dep in cover for a in dep.rhs}
    key = sorted(schema.universe - determined)
    rng = random.Random(seed)

    domain = max(2, limits.instance_domain_size)
    while domain ** len(key) < n_keys:
        domain += 1
    codes = rng.sample(range(domain ** len(key)), n_keys)
    values: Dict[str, List[int]] = {a: [] for a in key}
    for code in codes:
        for a in reversed(key):
            code, digit = divmod(code, domain)
            values[a].append(digit)

    for attribute in nx.lexicographical_topological_sort(graph):
        if attribute in values:
            continue
        parent = list(range(n_keys))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for dep in cover:
            if attribute not in dep.rhs:
                continue
            seen: Dict[Tuple[int, ...], int] = {}
            for t in range(n_keys):
                signature = tuple(values[a][t] for a in sorted(dep.lhs))
                if signature in seen:
                    parent[find(t)] = find(seen[signature])
                else:
                    seen[signature] = t
        drawn: Dict[int, int] = {}
        column = []
        for t in range(n_keys):
            root = find(t)
            if root not in drawn:
                drawn[root] = rng.randrange(domain)
            column.append(drawn[root])
        values[attribute] = column

    relation = RelationSchema("R_Omega", schema.universe, (frozenset(key),))
    records = [{a: values[a][t] for a in schema.universe} for t in range(n_keys)]
    return RelationInstance.from_records(relation, records)


@dataclass(frozen=True)
class InstanceJoinReport:
    lossless_observed: bool
    spurious_count: int
    original_size: int
    joined_size: int
    columns: Tuple[str, ...]
    spurious_rows: Tuple[Tuple[int, ...], ...]

    def to_dict(self):
        return {
            "lossless_observed": self.lossless_observed,
            "spurious_count": self.spurious_count,
            "original_size": self.original_size,
            "joined_size": self.joined_size,
            "columns": list(self.columns),
            "spurious_rows": [list(r) for r in self.spurious_rows],
        }


def natural_join(frames: Sequence[pd.DataFrame]) -> pd.DataFrame:
    """Natural join; frames without shared columns are combined by cross product"""
    joined = frames[0]
    for frame in frames[1:]:
        common = sorted(set(joined.columns) & set(frame.columns))
        if common:
            joined = joined.merge(frame, on=common, how="inner")
        else:
            joined = joined.merge(frame, how="cross")
        joined = joined.drop_duplicates()
    return joined


def instance_join_test(inst: RelationInstance, d: Decomposition) -> InstanceJoinReport:
    """Project inst onto every table of d, join the projections back and count spurious tuples"""
    frame = inst.to_frame()
    parts = [frame[sorted(rel.attrs)].drop_duplicates() for rel in d.relations]
    joined = natural_join(parts)[list(inst.columns)]
    joined_rows = {tuple(int(v) for v in row) for row in joined.itertuples(index=False, name=None)}
    original = set(inst.rows)
    missing = original - joined_rows
    if missing:
        logger.warning("join lost %d original tuples", len(missing))
    spurious = tuple(sorted(joined_rows - original))
    count = len(joined_rows) - len(original)
    return InstanceJoinReport(count == 0, count, len(original), len(joined_rows), inst.columns, spurious)


@dataclass(frozen=True)
class SpuriousDemonstration:
    seed: int
    instance: RelationInstance
    report: InstanceJoinReport

    def to_dict(self):
        return {"seed": self.seed, "instance": self.instance.to_dict(), "join": self.report.to_dict()}


def find_spurious_instance(
    schema: Schema,
    d: Decomposition,
    seed: int = 0,
    n_keys: int = 3,
    limits: AnalysisLimits = DEFAULT_LIMITS,
) -> Optional[SpuriousDemonstration]:
    """
    Try limits.instance_seed_attempts consecutive seeds starting at seed; the
    lowest seed producing a spurious tuple is returned, None if none does.
    """
    for s in range(seed, seed + limits.instance_seed_attempts):
        inst = generate_instance(schema, n_keys, s, limits)
        report = instance_join_test(inst, d)
        if report.spurious_count > 0:
            logger.debug("seed %d exhibits %d spurious tuples", s, report.spurious_count)
            return SpuriousDemonstration(s, inst, report)
    return None

