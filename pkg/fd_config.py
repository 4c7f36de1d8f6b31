"""
fdnorm configuration - size bounds for the exponential searches
"""
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from fd_errors import ConfigError


@dataclass(frozen=True)
class AnalysisLimits:
    """
    Bounds for every search that is exponential in the number of attributes.

    Exceeding a bound raises SizeLimitExceeded; nothing is silently truncated.
    """
    max_key_attrs: int = 20
    max_projection_attrs: int = 16
    transitive_powerset_width: int = 8
    powerset_chain_width: int = 6
    max_chain_paths: int = 5000
    instance_seed_attempts: int = 20
    instance_domain_size: int = 3

    def with_max_attrs(self, n: int) -> "AnalysisLimits":
        """Apply the CLI's --max-attrs flag to both attribute bounds"""
        return replace(self, max_key_attrs=n, max_projection_attrs=n)


DEFAULT_LIMITS = AnalysisLimits()


def load_config(path: Optional[Union[str, Path]], base: AnalysisLimits = DEFAULT_LIMITS) -> AnalysisLimits:
    """
    Load limit overrides from a JSON file

    Args:
        path: JSON file holding an object of overrides; None or a missing file
            yields `base` unchanged
        base: limits the overrides are applied to

    Returns:
        The merged AnalysisLimits

    Raises:
        ConfigError: unreadable JSON, unknown keys or non-positive values
    """
    if path is None:
        return base
    config_file = Path(path)
    if not config_file.exists():
        return base

    try:
        with open(config_file, "r", encoding="utf-8") as f:
            overrides: Dict[str, Any] = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_file}: invalid JSON ({e})") from e

    if not isinstance(overrides, dict):
        raise ConfigError(f"{config_file}: expected a JSON object")

    known = {f.name for f in fields(AnalysisLimits)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"{config_file}: unknown settings {', '.join(unknown)}")
    for key, value in overrides.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError(f"{config_file}: '{key}' must be a positive integer")

    return replace(base, **overrides)


def save_config(limits: AnalysisLimits, path: Union[str, Path]) -> None:
    """Write limits to a JSON file, creating parent directories"""
    config_file = Path(path)
    config_file.parent.mkdir(parents=True, exist_ok=True)
    with open(config_file, "w", encoding="utf-8") as f:
        json.dump(asdict(limits), f, indent=2)
