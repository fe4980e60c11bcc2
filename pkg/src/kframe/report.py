"""Structured verdicts returned by the ``check_*`` functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Report", "jsonable"]


def jsonable(value):
    """Convert numpy scalars/arrays and nested containers to plain Python."""
    if isinstance(value, Report):
        return value.as_dict()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


@dataclass
class Report:
    """A named verdict plus the numbers it was based on."""

    name: str
    passed: bool
    values: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def __getitem__(self, key):
        return self.values[key]

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "values": jsonable(self.values),
            "diagnostics": list(self.diagnostics),
        }
