"""Audit configuration: one JSON document driving fetch, check, and merge.

The effective settings are hashed into a config digest that every site
report carries, so a report can always be traced to the exact settings
that produced it (with the weight table inlined, not just its path).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .checks.mobile import MobileSettings
from .criteria import WeightTable, load_weight_table
from .errors import ConfigInvalid, WeightTableInvalid
from .snapshot import FetchLimits

CONFIG_ENV_VAR = "WIAUDIT_CONFIG"

OUTPUT_FORMATS = ("json", "csv", "markdown")

_FETCH_FIELDS = {
    "max_resources": int,
    "max_depth": int,
    "max_body_bytes": int,
    "per_host_delay_ms": int,
    "request_timeout_s": (int, float),
    "total_timeout_s": (int, float),
    "obey_robots": bool,
    "user_agent": str,
}

_MOBILE_FIELDS = {
    "enabled_tests": list,
    "max_markup_bytes": int,
    "max_total_bytes": int,
    "max_embedded_resources": int,
}

# Fields that must stay strictly positive.
_POSITIVE_FETCH = (
    "max_resources",
    "max_depth",
    "max_body_bytes",
    "request_timeout_s",
    "total_timeout_s",
)
_POSITIVE_MOBILE = ("max_markup_bytes", "max_total_bytes", "max_embedded_resources")


@dataclass(frozen=True)
class AuditConfig:
    """Effective settings for one audit run."""

    weight_table_path: Path | None = None
    fetch: FetchLimits = field(default_factory=FetchLimits)
    mobile: MobileSettings = field(default_factory=MobileSettings)
    accept_heuristics: bool = False
    format: str = "json"

    def load_weights(self) -> WeightTable:
        if self.weight_table_path is None:
            return WeightTable.default()
        return load_weight_table(self.weight_table_path)

    def digest(self) -> str:
        """Hash of the effective settings, weight table inlined."""
        weights = self.load_weights()
        effective = {
            "weights": {str(cid): weights.centiweight(cid) for cid in weights.entries},
            "fetch": {name: getattr(self.fetch, name) for name in _FETCH_FIELDS},
            "mobile": {
                "enabled_tests": list(self.mobile.enabled_tests),
                "max_markup_bytes": self.mobile.max_markup_bytes,
                "max_total_bytes": self.mobile.max_total_bytes,
                "max_embedded_resources": self.mobile.max_embedded_resources,
            },
            "accept_heuristics": self.accept_heuristics,
            "format": self.format,
        }
        canonical = json.dumps(effective, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _require_type(section: str, name: str, value, expected) -> None:
    if expected is bool:
        ok = isinstance(value, bool)
    else:
        ok = isinstance(value, expected) and not isinstance(value, bool)
    if not ok:
        raise ConfigInvalid(f"{section}.{name} has the wrong type")


def _check_keys(section: str, data: dict, allowed) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigInvalid(f"unknown {section} settings: {', '.join(sorted(unknown))}")


def parse_config(data: dict, *, base_dir: Path) -> AuditConfig:
    """Validate a decoded config document; paths resolve against base_dir."""
    if not isinstance(data, dict):
        raise ConfigInvalid("config document must be a JSON object")
    _check_keys(
        "config", data, ("weight_table", "fetch", "mobile", "accept_heuristics", "format")
    )

    weight_table_path: Path | None = None
    if "weight_table" in data:
        if not isinstance(data["weight_table"], str):
            raise ConfigInvalid("weight_table must be a path string")
        weight_table_path = (base_dir / data["weight_table"]).resolve()
        if not weight_table_path.is_file():
            raise ConfigInvalid(f"weight_table does not exist: {weight_table_path}")

    fetch_data = data.get("fetch", {})
    if not isinstance(fetch_data, dict):
        raise ConfigInvalid("fetch must be an object")
    _check_keys("fetch", fetch_data, _FETCH_FIELDS)
    for name, value in fetch_data.items():
        _require_type("fetch", name, value, _FETCH_FIELDS[name])
        if name in _POSITIVE_FETCH and value <= 0:
            raise ConfigInvalid(f"fetch.{name} must be positive")
        if name == "per_host_delay_ms" and value < 0:
            raise ConfigInvalid("fetch.per_host_delay_ms must not be negative")
    fetch = FetchLimits(**fetch_data)

    mobile_data = data.get("mobile", {})
    if not isinstance(mobile_data, dict):
        raise ConfigInvalid("mobile must be an object")
    _check_keys("mobile", mobile_data, _MOBILE_FIELDS)
    for name, value in mobile_data.items():
        _require_type("mobile", name, value, _MOBILE_FIELDS[name])
        if name in _POSITIVE_MOBILE and value <= 0:
            raise ConfigInvalid(f"mobile.{name} must be positive")
    if "enabled_tests" in mobile_data:
        tests = mobile_data["enabled_tests"]
        if not all(isinstance(t, str) for t in tests):
            raise ConfigInvalid("mobile.enabled_tests must be a list of test names")
        mobile_data = dict(mobile_data, enabled_tests=tuple(tests))
    try:
        mobile = MobileSettings(**mobile_data)
    except ValueError as exc:
        raise ConfigInvalid(str(exc))

    accept = data.get("accept_heuristics", False)
    if not isinstance(accept, bool):
        raise ConfigInvalid("accept_heuristics must be true or false")

    fmt = data.get("format", "json")
    if fmt not in OUTPUT_FORMATS:
        raise ConfigInvalid(f"format must be one of {', '.join(OUTPUT_FORMATS)}")

    return AuditConfig(
        weight_table_path=weight_table_path,
        fetch=fetch,
        mobile=mobile,
        accept_heuristics=accept,
        format=fmt,
    )


def load_config(path: str | Path) -> AuditConfig:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}")
    except UnicodeDecodeError as exc:
        raise ConfigInvalid(f"config file is not UTF-8: {exc.reason}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config file is not valid JSON: {exc}")
    config = parse_config(data, base_dir=path.parent)
    try:
        config.load_weights()
    except WeightTableInvalid as exc:
        raise ConfigInvalid(f"weight_table: {exc}")
    return config


def default_config() -> AuditConfig:
    """The configured default: $WIAUDIT_CONFIG when set, else built-ins."""
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return load_config(env_path)
    return AuditConfig()
