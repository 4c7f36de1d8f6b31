"""
fdnorm parser - the line-oriented schema (.fd) and decomposition (.dec) formats

Schema file:
    attributes: sid cid st cr rd
    fd: sid -> st
    fd: st cr -> rd      # comments run to the end of the line

Decomposition file:
    table R1: sid st
    table R2: cid cr
"""
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from fd_closure import build_relation
from fd_config import DEFAULT_LIMITS, AnalysisLimits
from fd_errors import (
    DuplicateAttributesLine,
    NotAttributePreserving,
    SchemaSyntaxError,
    SchemaValidationError,
    SyntaxIssue,
    UnknownAttribute,
)
from fd_model import (
    ATTRIBUTE_NAME,
    Decomposition,
    FDSet,
    FunctionalDependency,
    Schema,
    attrs,
)
from normal_forms import infer_provenance

TABLE_LINE = re.compile(r"^table\s+(?P<name>\S+)\s*:(?P<attrs>.*)$")


@dataclass(frozen=True)
class SchemaDocument:
    source: str
    schema: Schema
    attributes_line: int
    fd_lines: Dict[FunctionalDependency, int] = field(default_factory=dict)

    def line_of(self, fd: FunctionalDependency) -> Optional[int]:
        return self.fd_lines.get(fd)


def _lines(text: str):
    """(line number, 1-based column of the first character, content) without comments"""
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        stripped = content.lstrip()
        if stripped:
            yield number, len(content) - len(stripped) + 1, stripped


def _split_fd(body: str, line: int, col: int, issues: List[SyntaxIssue]) -> Optional[FunctionalDependency]:
    normalized = body.replace("→", "->")
    if normalized.count("->") != 1:
        expected = "'->'" if "->" not in normalized else "a single '->'"
        issues.append(SyntaxIssue(line, col, expected))
        return None
    left, _, right = normalized.partition("->")
    return FunctionalDependency(attrs(left), attrs(right))


def parse_schema_file(text: str) -> SchemaDocument:
    """
    Parse schema text

    Args:
        text: contents of a .fd file

    Returns:
        SchemaDocument with the validated Schema and declaration lines

    Raises:
        SchemaSyntaxError: positioned issues for every malformed line
        DuplicateAttributesLine: more than one 'attributes:' line
        SchemaValidationError: the parsed schema breaks a model invariant
    """
    issues: List[SyntaxIssue] = []
    duplicate = False
    universe = None
    attributes_line = 0
    fd_lines: Dict[FunctionalDependency, int] = {}

    for line, col, content in _lines(text):
        keyword, sep, body = content.partition(":")
        keyword = keyword.strip()
        if sep and keyword == "attributes":
            if universe is not None:
                duplicate = True
                issues.append(SyntaxIssue(line, col, "a single 'attributes:' line"))
                continue
            names = body.split()
            repeated = sorted({n for n in names if names.count(n) > 1})
            if repeated:
                issues.append(SyntaxIssue(line, col + len("attributes:"), "distinct attribute names"))
            universe = frozenset(names)
            attributes_line = line
        elif sep and keyword == "fd":
            dep = _split_fd(body, line, col + len("fd:"), issues)
            if dep is not None:
                fd_lines.setdefault(dep, line)
        else:
            issues.append(SyntaxIssue(line, col, "'attributes:' or 'fd:'"))

    if universe is None:
        issues.append(SyntaxIssue(1, 1, "an 'attributes:' line"))
    if issues:
        issues.sort(key=lambda i: (i.line, i.col))
        if duplicate:
            raise DuplicateAttributesLine(issues)
        raise SchemaSyntaxError(issues)

    schema = Schema(universe, FDSet(frozenset(fd_lines)))
    return SchemaDocument(text, schema, attributes_line, fd_lines)


def load_schema(path: Union[str, Path]) -> SchemaDocument:
    with open(path, "r", encoding="utf-8") as f:
        return parse_schema_file(f.read())


def parse_decomposition_file(
    text: str, schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS
) -> Decomposition:
    """
    Parse decomposition text against a schema

    Candidate keys are computed for every table and provenance tags are
    inferred from the table structure; tables keep their declared names and order.

    Raises:
        SchemaSyntaxError: malformed lines or repeated table names
        SchemaValidationError: tables naming attributes outside the universe
        NotAttributePreserving: the tables do not cover the universe
    """
    issues: List[SyntaxIssue] = []
    unknown: List[UnknownAttribute] = []
    tables: List[Tuple[str, frozenset]] = []
    seen = set()

    for line, col, content in _lines(text):
        match = TABLE_LINE.match(content)
        if not match:
            issues.append(SyntaxIssue(line, col, "'table <name>: <attributes>'"))
            continue
        name = match.group("name")
        names = match.group("attrs").split()
        if not ATTRIBUTE_NAME.match(name):
            issues.append(SyntaxIssue(line, col + len("table "), "a table name"))
            continue
        if name in seen:
            issues.append(SyntaxIssue(line, col + len("table "), f"a table name other than '{name}'"))
            continue
        if not names:
            issues.append(SyntaxIssue(line, col + len(content), "at least one attribute"))
            continue
        seen.add(name)
        unknown.extend(UnknownAttribute(f"table {name}", a) for a in sorted(set(names) - schema.universe))
        tables.append((name, frozenset(names)))

    if not tables and not issues:
        issues.append(SyntaxIssue(1, 1, "at least one 'table' line"))
    if issues:
        raise SchemaSyntaxError(issues)
    if unknown:
        raise SchemaValidationError(unknown)

    covered = frozenset().union(*(scope for _, scope in tables))
    if covered != schema.universe:
        raise NotAttributePreserving(schema.universe - covered)
    relations = tuple(build_relation(name, scope, schema.fds, limits) for name, scope in tables)
    return Decomposition(relations, tuple(infer_provenance(rel, schema, limits) for rel in relations))


def load_decomposition(
    path: Union[str, Path], schema: Schema, limits: AnalysisLimits = DEFAULT_LIMITS
) -> Decomposition:
    with open(path, "r", encoding="utf-8") as f:
        return parse_decomposition_file(f.read(), schema, limits)


def render_schema(schema: Schema) -> str:
    lines = ["attributes: " + " ".join(sorted(schema.universe))]
    for dep in schema.fds:
        lines.append(f"fd: {' '.join(sorted(dep.lhs))} -> {' '.join(sorted(dep.rhs))}")
    return "\n".join(lines) + "\n"


def render_decomposition(d: Decomposition) -> str:
    """.dec text, one table per line with its provenance tag as a comment"""
    lines = []
    for rel, tag in d:
        lines.append(f"table {rel.name}: {' '.join(sorted(rel.attrs))}  # {tag.value}")
    return "\n".join(lines) + "\n"
