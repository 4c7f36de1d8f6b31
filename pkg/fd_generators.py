"""
fdnorm generators - seeded random schemas and decompositions for property runs

Every generator takes a random.Random so a run is reproducible from its seed.
"""
import random
from typing import List, Optional, Sequence

from fd_closure import build_relation
from fd_model import FD, Decomposition, FDSet, FunctionalDependency, Provenance, Schema
from normal_forms import with_inferred_provenance


def attribute_names(n: int) -> List[str]:
    return [f"A{i}" for i in range(1, n + 1)]


def _subset(rng: random.Random, pool: Sequence[str], max_size: int) -> List[str]:
    size = rng.randint(1, min(max_size, len(pool)))
    return rng.sample(list(pool), size)


def random_schema(
    rng: random.Random, max_attrs: int = 6, max_fds: int = 6, min_attrs: int = 2, max_lhs: int = 3
) -> Schema:
    """Unconstrained schema: any determinant, any dependent, trivial members allowed"""
    names = attribute_names(rng.randint(min_attrs, max_attrs))
    fds = set()
    for _ in range(rng.randint(0, max_fds)):
        fds.add(FD(_subset(rng, names, max_lhs), _subset(rng, names, 2)))
    return Schema(frozenset(names), FDSet(frozenset(fds)))


def acyclic_schema(rng: random.Random, max_attrs: int = 5, max_fds: int = 5, max_lhs: int = 2) -> Schema:
    """Every determinant precedes its dependent in a fixed order, so covers stay acyclic"""
    names = attribute_names(rng.randint(2, max_attrs))
    fds = set()
    for _ in range(rng.randint(0, max_fds)):
        target = rng.randrange(1, len(names))
        lhs = _subset(rng, names[:target], max_lhs)
        fds.add(FD(lhs, [names[target]]))
    return Schema(frozenset(names), FDSet(frozenset(fds)))


def two_component_schema(rng: random.Random, max_extra: int = 5) -> Schema:
    """
    Single key {A1, A2} whose dependencies each stay on one side

    Non-key attributes are dealt into four groups: reachable from A1 only, from
    A2 only, from both (one dependency per side) and residual (determinants
    containing the whole key).
    """
    extra = attribute_names(2 + rng.randint(1, max_extra))[2:]
    side1, side2, both, residual = [], [], [], []
    groups = [side1, side2, both, residual]
    for name in extra:
        rng.choice(groups).append(name)

    fds = set()
    reach1, reach2 = ["A1"], ["A2"]
    for name in side1:
        fds.add(FD(_subset(rng, reach1, 2), [name]))
        reach1.append(name)
    for name in side2:
        fds.add(FD(_subset(rng, reach2, 2), [name]))
        reach2.append(name)
    for name in both:
        fds.add(FD(_subset(rng, reach1, 2), [name]))
        fds.add(FD(_subset(rng, reach2, 2), [name]))
        reach1.append(name)
        reach2.append(name)
    placed = ["A1", "A2"] + side1 + side2 + both
    for name in residual:
        others = [a for a in placed if a not in ("A1", "A2")]
        lhs = ["A1", "A2"] + (rng.sample(others, rng.randint(0, min(1, len(others)))) if others else [])
        fds.add(FD(lhs, [name]))
        placed.append(name)
    return Schema(frozenset(["A1", "A2"] + extra), FDSet(frozenset(fds)))


def planted_pair_schema(rng: random.Random, max_chain: int = 3, max_noise: int = 3) -> Schema:
    """
    Key of two attributes with two disjoint chains whose ends jointly, and
    only jointly, determine a further attribute; noise dependencies only ever
    determine fresh attributes. Names are shuffled so position carries no meaning.
    """
    len_a = rng.randint(2, max_chain)
    len_b = rng.randint(2, max_chain)
    noise = rng.randint(0, max_noise)
    total = len_a + len_b + 1 + noise
    names = attribute_names(total)
    rng.shuffle(names)

    chain_a = names[:len_a]
    chain_b = names[len_a:len_a + len_b]
    gamma = names[len_a + len_b]
    fresh = names[len_a + len_b + 1:]

    fds = set()
    for chain in (chain_a, chain_b):
        for left, right in zip(chain, chain[1:]):
            fds.add(FD([left], [right]))
    fds.add(FD([chain_a[-1], chain_b[-1]], [gamma]))

    placed = chain_a + chain_b + [gamma]
    for name in fresh:
        fds.add(FD(_subset(rng, placed, 2), [name]))
        placed.append(name)
    return Schema(frozenset(names), FDSet(frozenset(fds)))


def random_renaming(rng: random.Random, schema: Schema, prefix: str = "X"):
    """A bijective renaming onto fresh names, in shuffled order"""
    old = sorted(schema.universe)
    new = [f"{prefix}{i}" for i in range(1, len(old) + 1)]
    rng.shuffle(new)
    return dict(zip(old, new))


def random_decomposition(
    rng: random.Random, schema: Schema, max_tables: int = 3, overlap: float = 0.3
) -> Decomposition:
    """Attribute-preserving random tables; tags inferred from table structure"""
    count = rng.randint(1, max_tables)
    tables: List[set] = [set() for _ in range(count)]
    for name in sorted(schema.universe):
        tables[rng.randrange(count)].add(name)
        for t in tables:
            if rng.random() < overlap:
                t.add(name)
    scopes = sorted({frozenset(t) for t in tables if t}, key=sorted)
    relations = tuple(build_relation(f"R{i}", s, schema.fds) for i, s in enumerate(scopes, start=1))
    d = Decomposition(relations, (Provenance.SYNTHESIS,) * len(relations))
    return with_inferred_provenance(d, schema)
