"""Analysis configurations.

A configuration is a small JSON file selecting the numeric domain stack
and the fixpoint policy, so switching an analysis from intervals to the
reduced product is a data change, not a code change:

    {"name": "product", "numeric": {"product": ["intervals", "zones"]},
     "widening_delay": 1, "narrowing_passes": 1, "thresholds": "static"}

Unknown keys and unknown domain names are rejected loudly; silently
ignoring a typo in an analysis configuration wastes afternoons.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Union

from ..domains import (
    BrokenIntervalDomain,
    Domain,
    IntervalDomain,
    ProductDomain,
    ZoneDomain,
)


class ConfigError(Exception):
    pass


# "broken-intervals" is a deliberately unsound test domain; see
# domains/broken.py.
_SIMPLE_DOMAINS = {
    "intervals": IntervalDomain,
    "zones": ZoneDomain,
    "broken-intervals": BrokenIntervalDomain,
}

_ALLOWED_KEYS = {"name", "numeric", "widening_delay", "narrowing_passes", "thresholds"}


@dataclass(frozen=True)
class Configuration:
    name: str
    numeric: Union[str, tuple[str, ...]]  # domain name, or product members
    widening_delay: int = 1
    narrowing_passes: int = 1
    thresholds: str = "static"  # "static" | "collected"


def _parse_numeric(raw) -> Union[str, tuple[str, ...]]:
    if isinstance(raw, str):
        if raw not in _SIMPLE_DOMAINS:
            raise ConfigError(
                f"unknown domain {raw!r}; known: {sorted(_SIMPLE_DOMAINS)} or a product"
            )
        return raw
    if isinstance(raw, dict) and set(raw) == {"product"}:
        members = raw["product"]
        if members != ["intervals", "zones"]:
            raise ConfigError(
                'the product combinator supports exactly ["intervals", "zones"]'
            )
        return tuple(members)
    raise ConfigError(f"malformed numeric domain spec: {raw!r}")


def load_config(path: str) -> Configuration:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: configuration must be a JSON object")
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown configuration keys {sorted(unknown)}")
    if "numeric" not in raw:
        raise ConfigError(f"{path}: missing required key 'numeric'")
    numeric = _parse_numeric(raw["numeric"])
    delay = raw.get("widening_delay", 1)
    narrow = raw.get("narrowing_passes", 1)
    thresholds = raw.get("thresholds", "static")
    if not isinstance(delay, int) or delay < 0:
        raise ConfigError(f"{path}: widening_delay must be a nonnegative integer")
    if not isinstance(narrow, int) or narrow < 0:
        raise ConfigError(f"{path}: narrowing_passes must be a nonnegative integer")
    if thresholds not in ("static", "collected"):
        raise ConfigError(f"{path}: thresholds must be \"static\" or \"collected\"")
    name = raw.get("name") or os.path.splitext(os.path.basename(path))[0]
    if not isinstance(name, str):
        raise ConfigError(f"{path}: name must be a string")
    return Configuration(name, numeric, delay, narrow, thresholds)


def build_domain(config: Configuration) -> Domain:
    if isinstance(config.numeric, tuple):
        return ProductDomain()
    return _SIMPLE_DOMAINS[config.numeric]()
