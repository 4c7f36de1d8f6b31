"""
fdnorm errors - exception hierarchy shared by every analysis module
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple


class FDNormError(Exception):
    """Base class for all fdnorm errors"""


# Schema validation records. They are collected, not raised one by one, so a
# caller sees every problem of a schema at once.

@dataclass(frozen=True)
class UnknownAttribute:
    fd: str
    name: str

    def __str__(self):
        return f"unknown attribute '{self.name}' in {self.fd}"


@dataclass(frozen=True)
class EmptyFdSide:
    fd: str
    side: str

    def __str__(self):
        return f"empty {self.side} in {self.fd}"


@dataclass(frozen=True)
class EmptyUniverse:
    def __str__(self):
        return "attribute universe is empty"


@dataclass(frozen=True)
class InvalidAttributeName:
    name: str

    def __str__(self):
        return f"invalid attribute name '{self.name}'"


class SchemaValidationError(FDNormError):
    """Raised with the complete list of schema violations"""

    def __init__(self, errors: Sequence[object]):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class SizeLimitExceeded(FDNormError):
    """An exponential search was asked to run past its configured bound"""

    def __init__(self, what: str, size: int, bound: int):
        self.what = what
        self.size = size
        self.bound = bound
        super().__init__(f"{what}: size {size} exceeds the bound of {bound}")


class AssumptionViolated(FDNormError):
    """The schema is outside the single-table, single-two-component-key setup"""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        message = reason if not detail else f"{reason}: {detail}"
        super().__init__(message)


class VariantInapplicable(FDNormError):
    pass


class CyclicCover(FDNormError):
    def __init__(self, cycle: Sequence[Tuple[str, str]]):
        self.cycle = list(cycle)
        edges = ", ".join(f"{a} → {b}" for a, b in self.cycle)
        super().__init__(f"minimal cover has a cyclic determinant graph ({edges})")


@dataclass(frozen=True)
class SyntaxIssue:
    line: int
    col: int
    expected: str

    def __str__(self):
        return f"line {self.line}, column {self.col}: expected {self.expected}"


class SchemaSyntaxError(FDNormError):
    def __init__(self, issues: List[SyntaxIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class DuplicateAttributesLine(SchemaSyntaxError):
    pass


class NotAttributePreserving(FDNormError):
    def __init__(self, missing: Sequence[str], extra: Sequence[str] = ()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        parts = []
        if self.missing:
            parts.append("missing " + ", ".join(self.missing))
        if self.extra:
            parts.append("unknown " + ", ".join(self.extra))
        super().__init__("decomposition is not attribute preserving: " + "; ".join(parts))


class ConfigError(FDNormError):
    pass
