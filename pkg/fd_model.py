"""
fdnorm schema model - attributes, functional dependencies, schemas and decompositions

All values are immutable; attribute sets are frozensets rendered in canonical
(lexicographic) order.
"""
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterable, Iterator, List, Tuple, Union

from fd_errors import (
    EmptyFdSide,
    EmptyUniverse,
    InvalidAttributeName,
    NotAttributePreserving,
    SchemaValidationError,
    UnknownAttribute,
)

AttributeSet = FrozenSet[str]

ATTRIBUTE_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
EMPTY: AttributeSet = frozenset()


def attrs(names: Union[str, Iterable[str]] = ()) -> AttributeSet:
    """Build an attribute set from an iterable or a whitespace separated string"""
    if isinstance(names, str):
        names = names.split()
    return frozenset(names)


def attr_key(x: Iterable[str]) -> Tuple[str, ...]:
    """Canonical sort key of an attribute set"""
    return tuple(sorted(x))


def render_attrs(x: Iterable[str]) -> str:
    names = sorted(x)
    if not names:
        return "∅"
    if len(names) == 1:
        return names[0]
    return "{" + ", ".join(names) + "}"


@dataclass(frozen=True)
class FunctionalDependency:
    lhs: AttributeSet
    rhs: AttributeSet

    def __post_init__(self):
        object.__setattr__(self, "lhs", frozenset(self.lhs))
        object.__setattr__(self, "rhs", frozenset(self.rhs))

    @classmethod
    def parse(cls, text: str) -> "FunctionalDependency":
        """Parse 'A1 A2 -> A3' (the unicode arrow is accepted too)"""
        left, sep, right = text.replace("→", "->").partition("->")
        if not sep:
            raise ValueError(f"not a functional dependency: {text!r}")
        return cls(attrs(left), attrs(right))

    @property
    def attributes(self) -> AttributeSet:
        return self.lhs | self.rhs

    def is_trivial(self) -> bool:
        return self.rhs <= self.lhs

    def split(self) -> List["FunctionalDependency"]:
        """Singleton right-hand-side form"""
        return [FunctionalDependency(self.lhs, frozenset([a])) for a in sorted(self.rhs)]

    def sort_key(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        return attr_key(self.lhs), attr_key(self.rhs)

    def __str__(self):
        return f"{render_attrs(self.lhs)} → {render_attrs(self.rhs)}"

    def to_dict(self):
        return {"lhs": sorted(self.lhs), "rhs": sorted(self.rhs)}


FD = FunctionalDependency


@dataclass(frozen=True)
class FDSet:
    """A set of functional dependencies; equality ignores order and duplicates"""
    fds: FrozenSet[FunctionalDependency] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "fds", frozenset(self.fds))

    @classmethod
    def of(cls, *items: Union[str, FunctionalDependency]) -> "FDSet":
        return cls(frozenset(FD.parse(i) if isinstance(i, str) else i for i in items))

    def __iter__(self) -> Iterator[FunctionalDependency]:
        return iter(sorted(self.fds, key=FunctionalDependency.sort_key))

    def __len__(self) -> int:
        return len(self.fds)

    def __contains__(self, item) -> bool:
        return item in self.fds

    @property
    def attributes(self) -> AttributeSet:
        result = set()
        for f in self.fds:
            result |= f.attributes
        return frozenset(result)

    def singleton_form(self) -> "FDSet":
        return FDSet(frozenset(s for f in self.fds for s in f.split()))

    def __str__(self):
        return "{" + ", ".join(str(f) for f in self) + "}"


def schema_violations(universe: AttributeSet, fds: FDSet) -> List[object]:
    """Every violation of the Schema invariants, in a deterministic order"""
    errors: List[object] = []
    if not universe:
        errors.append(EmptyUniverse())
    for name in sorted(universe):
        if not ATTRIBUTE_NAME.match(name):
            errors.append(InvalidAttributeName(name))
    for f in fds:
        if not f.lhs:
            errors.append(EmptyFdSide(str(f), "determinant"))
        if not f.rhs:
            errors.append(EmptyFdSide(str(f), "dependent"))
        for name in sorted(f.attributes - universe):
            errors.append(UnknownAttribute(str(f), name))
    return errors


@dataclass(frozen=True)
class Schema:
    """The universe Ω (the single initial table) and its dependencies F"""
    universe: AttributeSet
    fds: FDSet = field(default_factory=FDSet)

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        errors = schema_violations(self.universe, self.fds)
        if errors:
            raise SchemaValidationError(errors)

    def rename(self, mapping) -> "Schema":
        """Apply a bijective attribute renaming"""
        def r(x):
            return frozenset(mapping[a] for a in x)
        return Schema(r(self.universe), FDSet(frozenset(FD(r(f.lhs), r(f.rhs)) for f in self.fds)))


def validate_schema(universe: Iterable[str], fds: FDSet) -> Schema:
    """
    Build a Schema, checking every invariant

    Raises:
        SchemaValidationError: carrying all violations found
    """
    return Schema(frozenset(universe), fds)


@dataclass(frozen=True)
class RelationSchema:
    """A named table; candidate keys are computed (see fd_closure.build_relation)"""
    name: str
    attrs: AttributeSet
    candidate_keys: Tuple[AttributeSet, ...] = ()

    @property
    def prime(self) -> AttributeSet:
        result = set()
        for k in self.candidate_keys:
            result |= k
        return frozenset(result)

    def __str__(self):
        keys = ", ".join(render_attrs(k) for k in self.candidate_keys)
        return f"{self.name}({', '.join(sorted(self.attrs))}) keys: {keys}"

    def to_dict(self):
        return {
            "name": self.name,
            "attributes": sorted(self.attrs),
            "candidate_keys": [sorted(k) for k in self.candidate_keys],
        }


class Provenance(str, Enum):
    KEY_FRAGMENT = "key-fragment"
    PARTIAL_DEPENDENCY_SPLIT = "partial-dependency-split"
    TRANSITIVITY_SPLIT = "transitivity-split"
    RESIDUAL_KEY_TABLE = "residual-key-table"
    SYNTHESIS = "synthesis"


@dataclass(frozen=True)
class Decomposition:
    relations: Tuple[RelationSchema, ...]
    provenance: Tuple[Provenance, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        if len(self.relations) != len(self.provenance):
            raise ValueError("one provenance tag per relation is required")
        for rel in self.relations:
            if not rel.attrs:
                raise ValueError(f"relation {rel.name} has no attributes")

    @property
    def attributes(self) -> AttributeSet:
        result = set()
        for rel in self.relations:
            result |= rel.attrs
        return frozenset(result)

    def check(self, universe: AttributeSet) -> "Decomposition":
        """Assert the union of the tables is exactly the universe"""
        covered = self.attributes
        if covered != universe:
            raise NotAttributePreserving(universe - covered, covered - universe)
        return self

    def renumbered(self) -> "Decomposition":
        """Canonical order (sorted attribute tuples) and names R1..Rn"""
        pairs = sorted(zip(self.relations, self.provenance), key=lambda p: attr_key(p[0].attrs))
        return Decomposition(
            tuple(replace(rel, name=f"R{i}") for i, (rel, _) in enumerate(pairs, start=1)),
            tuple(tag for _, tag in pairs),
        )

    def tables(self) -> List[AttributeSet]:
        return [rel.attrs for rel in self.relations]

    def __iter__(self):
        return iter(zip(self.relations, self.provenance))

    def __len__(self):
        return len(self.relations)

    def to_dict(self):
        return {
            "tables": [
                dict(rel.to_dict(), provenance=tag.value) for rel, tag in self
            ]
        }


