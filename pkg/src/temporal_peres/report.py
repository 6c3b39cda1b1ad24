"""Versioned JSON reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    error: str | None = None

    def check(self, name: str, passed: bool) -> bool:
        self.checks[name] = bool(passed)
        return bool(passed)

    @property
    def verdict(self) -> str:
        return "pass" if self.error is None and self.checks and all(self.checks.values()) else "fail"

    def to_json(self) -> dict[str, Any]:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "checks": [{"name": k, "passed": v} for k, v in self.checks.items()],
            "notes": self.notes,
            "verdict": self.verdict,
        }
        if self.error is not None:
            doc["error"] = self.error
        return doc


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    close = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj}")
        text = format(obj, ".17g")
        # keep floats recognizable as floats after a round trip
        return text if any(ch in text for ch in ".e") else text + ".0"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + close + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_schema() -> dict:
    text = resources.files("temporal_peres").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
