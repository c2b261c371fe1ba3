"""Service configuration loaded from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class ServiceConfig:
    backend_base_url: str = ""
    model: str = "gpt-3.5-turbo"
    timeout_seconds: float = 30.0
    max_concurrent_backend_calls: int = 4
    row_cap: int = 100


def load_service_config(path: str | Path | None) -> ServiceConfig:
    """Config from a JSON object file; missing keys keep their defaults."""
    if path is None:
        return ServiceConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    known = {f.name for f in fields(ServiceConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    if "timeout_seconds" in raw:
        raw["timeout_seconds"] = float(raw["timeout_seconds"])
    return ServiceConfig(**raw)
