"""Named scenario fixtures shipped with the package.

These back the CLI examples and the HTTP API's named-scenario path.
Each fixture is a JSON scenario document under scenarios/.
"""

from __future__ import annotations

import json
from importlib import resources

from .errors import ValidationError
from .io_formats import read_scenario

_PACKAGE_DIR = "scenarios"


def scenario_names() -> list[str]:
    """Shipped scenario names, sorted."""
    root = resources.files(__package__) / _PACKAGE_DIR
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_scenario_bytes(name: str) -> bytes:
    if name not in scenario_names():
        raise KeyError(name)
    return (resources.files(__package__) / _PACKAGE_DIR / f"{name}.json").read_bytes()


def load_scenario(name: str):
    """(SimConfig, shocks, schedule) for a shipped scenario."""
    return read_scenario(load_scenario_bytes(name))


def scenario_summaries() -> list[dict]:
    """Name, description, and step count per shipped scenario."""
    summaries = []
    for name in scenario_names():
        doc = json.loads(load_scenario_bytes(name).decode("utf-8"))
        if not isinstance(doc, dict):
            raise ValidationError(f"shipped scenario {name!r} is not an object")
        summaries.append(
            {
                "name": name,
                "description": doc.get("description", ""),
                "steps": doc.get("steps", 40),
            }
        )
    return summaries
