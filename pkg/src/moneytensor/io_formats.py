"""Canonical file formats: indicator CSV, tensor JSON, scenario JSON.

All writers are byte-deterministic. Reals in the indicator CSV carry 9
significant digits, enough to round-trip the simulation's meaningful
precision while keeping files diffable. Parsers are strict: unknown
keys, missing fields, and invariant violations raise SchemaError with a
dotted path to the offending location.

Scenario schema (JSON object, all keys optional except taxonomy):

    description   free-text string
    taxonomy      {sectors, agents, periods, sector_tags?}
    beta          number (default 1.0)
    initial       {m1, m2, m3, r1, r2}; each a number (uniform fill)
                  or a sectors x agents nested list
                  (defaults: m1=1, m2=m3=0.5, r1=r2=1 -- a balanced economy)
    indicators    {g_star, pi_star, okun_b, u0, u_min, u_max,
                   export_sectors (sector labels), import_propensity, noise_sd}
    seed          integer (default 0)
    steps         integer >= 1 (default 40)
    shocks        [{kind, start_step, duration, severity}, ...]
    schedule      {"<step>": [{kind, magnitude, sectors, agents}, ...]}
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import CsvFormatError, SchemaError, ValidationError
from .ledger import Taxonomy
from .policy import ACTION_KINDS, PolicyAction
from .sim import IndicatorFrame, IndicatorParams, Shock, SimConfig
from .tensor_core import Tensor3

INDICATOR_HEADER = (
    "step,gdp_growth,inflation,unemployment,trade_balance,economic_resistance,actions"
)

_SCENARIO_KEYS = {
    "description", "taxonomy", "beta", "initial", "indicators",
    "seed", "steps", "shocks", "schedule",
}
_TAXONOMY_KEYS = {"sectors", "agents", "periods", "sector_tags"}
_INITIAL_KEYS = {"m1", "m2", "m3", "r1", "r2"}
_INDICATOR_KEYS = {
    "g_star", "pi_star", "okun_b", "u0", "u_min", "u_max",
    "export_sectors", "import_propensity", "noise_sd",
}
_SHOCK_KEYS = {"kind", "start_step", "duration", "severity"}
_ACTION_KEYS = {"kind", "magnitude", "sectors", "agents"}
_TENSOR_KEYS = {"dims", "sectors", "agents", "periods", "sector_tags", "values"}

DEFAULT_STEPS = 40
_DEFAULT_INITIAL = {"m1": 1.0, "m2": 0.5, "m3": 0.5, "r1": 1.0, "r2": 1.0}


def format_real(x: float) -> str:
    """9-significant-digit decimal used in all delimited output."""
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".9g")


def write_indicator_csv(frames) -> bytes:
    """Indicator frames as delimited text, one row per step."""
    lines = [INDICATOR_HEADER]
    for frame in frames:
        actions = ";".join(
            f"{a.kind}:{format_real(a.magnitude)}" for a in frame.actions
        )
        lines.append(
            ",".join(
                [
                    str(frame.step),
                    format_real(frame.gdp_growth),
                    format_real(frame.inflation),
                    format_real(frame.unemployment),
                    format_real(frame.trade_balance),
                    format_real(frame.economic_resistance),
                    actions,
                ]
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_indicator_csv(data: bytes) -> list[dict]:
    """Parse indicator CSV rows back into plain records.

    Actions come back as (kind, magnitude) pairs; targets are not part
    of the CSV contract.
    """
    text = data.decode("utf-8")
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln != ""]
    if not lines or lines[0] != INDICATOR_HEADER:
        raise CsvFormatError(1, f"expected header {INDICATOR_HEADER}")
    records = []
    for n, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 7:
            raise CsvFormatError(n, f"expected 7 fields, got {len(fields)}")
        try:
            actions = []
            if fields[6]:
                for item in fields[6].split(";"):
                    kind, _, mag = item.partition(":")
                    if kind not in ACTION_KINDS:
                        raise ValueError(f"bad action kind {kind!r}")
                    actions.append((kind, float(mag)))
            records.append(
                {
                    "step": int(fields[0]),
                    "gdp_growth": float(fields[1]),
                    "inflation": float(fields[2]),
                    "unemployment": float(fields[3]),
                    "trade_balance": float(fields[4]),
                    "economic_resistance": float(fields[5]),
                    "actions": actions,
                }
            )
        except ValueError as exc:
            raise CsvFormatError(n, str(exc)) from None
    return records


def frame_to_json_dict(frame: IndicatorFrame) -> dict:
    """Frame as a JSON-ready mapping, mirroring the CSV columns."""
    return {
        "step": frame.step,
        "gdp_growth": frame.gdp_growth,
        "inflation": frame.inflation,
        "unemployment": frame.unemployment,
        "trade_balance": frame.trade_balance,
        "economic_resistance": frame.economic_resistance,
        "actions": [
            {"kind": a.kind, "magnitude": a.magnitude} for a in frame.actions
        ],
    }


def write_tensor_json(t: Tensor3, tax: Taxonomy) -> bytes:
    """Tensor plus axis labels as structural JSON; exact float round-trip."""
    if t.dims != tax.dims:
        raise ValidationError(f"tensor dims {t.dims} do not match taxonomy {tax.dims}")
    doc = {
        "dims": list(t.dims),
        "sectors": list(tax.sectors),
        "agents": list(tax.agents),
        "periods": list(tax.periods),
        "values": [float(v) for v in t.values.ravel()],
    }
    if tax.sector_tags:
        doc["sector_tags"] = {s: sorted(tags) for s, tags in tax.sector_tags.items()}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def read_tensor_json(data: bytes) -> tuple[Tensor3, Taxonomy]:
    doc = _load_json_object(data, "tensor")
    _reject_unknown(doc, _TENSOR_KEYS, "tensor")
    for key in ("dims", "sectors", "agents", "periods", "values"):
        if key not in doc:
            raise SchemaError(f"tensor.{key}", "missing required field")
    dims = doc["dims"]
    if (
        not isinstance(dims, list)
        or len(dims) != 3
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise SchemaError("tensor.dims", "must be three integers >= 1")
    tax = _parse_taxonomy(
        {
            "sectors": doc["sectors"],
            "agents": doc["agents"],
            "periods": doc["periods"],
            "sector_tags": doc.get("sector_tags", {}),
        },
        "tensor",
    )
    if list(tax.dims) != dims:
        raise SchemaError("tensor.dims", f"dims {dims} do not match label counts {list(tax.dims)}")
    values = doc["values"]
    if not isinstance(values, list) or len(values) != dims[0] * dims[1] * dims[2]:
        raise SchemaError(
            "tensor.values",
            f"expected {dims[0] * dims[1] * dims[2]} values, got "
            f"{len(values) if isinstance(values, list) else type(values).__name__}",
        )
    try:
        tensor = Tensor3.from_flat(tuple(dims), [float(v) for v in values])
    except (TypeError, ValueError, ValidationError) as exc:
        raise SchemaError("tensor.values", str(exc)) from None
    return tensor, tax


def read_taxonomy_json(data: bytes) -> Taxonomy:
    doc = _load_json_object(data, "taxonomy")
    return _parse_taxonomy(doc, "")


def read_scenario(data: bytes) -> tuple[SimConfig, tuple[Shock, ...], dict]:
    """Parse and fully validate a scenario document.

    Returns the simulation config, the shock list, and the intervention
    schedule as {step index: (PolicyAction, ...)}.
    """
    doc = _load_json_object(data, "scenario")
    _reject_unknown(doc, _SCENARIO_KEYS, "scenario")
    if "description" in doc and not isinstance(doc["description"], str):
        raise SchemaError("description", "must be a string")
    if "taxonomy" not in doc:
        raise SchemaError("taxonomy", "missing required field")

    beta = _real(doc.get("beta", 1.0), "beta")
    seed = _integer(doc.get("seed", 0), "seed")
    steps = _integer(doc.get("steps", DEFAULT_STEPS), "steps")

    # A scenario's time axis is the step sequence, so its taxonomy may
    # omit periods; they default to one label per step.
    default_periods = tuple(f"t{k:02d}" for k in range(max(steps, 1)))
    tax = _parse_taxonomy(doc["taxonomy"], "taxonomy", default_periods=default_periods)

    initial = doc.get("initial", {})
    if not isinstance(initial, dict):
        raise SchemaError("initial", "must be an object")
    _reject_unknown(initial, _INITIAL_KEYS, "initial")
    shape = (tax.n_sectors, tax.n_agents)
    matrices = {
        name: _matrix_entry(initial.get(name, default), shape, f"initial.{name}")
        for name, default in _DEFAULT_INITIAL.items()
    }

    indicators = _parse_indicators(doc.get("indicators", {}), tax)

    try:
        cfg = SimConfig(
            taxonomy=tax,
            beta=beta,
            indicators=indicators,
            seed=seed,
            steps=steps,
            **matrices,
        )
    except ValidationError as exc:
        raise SchemaError("scenario", str(exc)) from None

    shocks = _parse_shocks(doc.get("shocks", []), tax)
    schedule = _parse_schedule(doc.get("schedule", {}), tax, steps)
    return cfg, shocks, schedule


def parse_action_json(obj, tax: Taxonomy, path: str = "action") -> PolicyAction:
    """One intervention object {kind, magnitude, sectors, agents} -> action.

    Shared by scenario schedules and the HTTP step endpoint; sector and
    agent targets are given as taxonomy labels.
    """
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    _reject_unknown(obj, _ACTION_KEYS, path)
    for key in ("kind", "magnitude", "sectors", "agents"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing required field")
    kind = obj["kind"]
    if kind not in ACTION_KINDS:
        raise SchemaError(f"{path}.kind", f"unknown action kind {kind!r}")
    magnitude = _real(obj["magnitude"], f"{path}.magnitude")
    sectors = _label_list(obj["sectors"], tax.sector_index, f"{path}.sectors")
    agents = _label_list(obj["agents"], tax.agent_index, f"{path}.agents")
    try:
        return PolicyAction(
            kind=kind,
            magnitude=magnitude,
            target_sectors=sectors,
            target_agents=agents,
        )
    except ValidationError as exc:
        raise SchemaError(path, str(exc)) from None


def _load_json_object(data: bytes, what: str) -> dict:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(what, f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError(what, "top level must be a JSON object")
    return doc


def _reject_unknown(doc: dict, allowed: set, path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise SchemaError(where, "unknown key")


def _parse_taxonomy(doc, path: str, default_periods: tuple = ()) -> Taxonomy:
    prefix = f"{path}." if path else ""
    if not isinstance(doc, dict):
        raise SchemaError(path or "taxonomy", "must be an object")
    _reject_unknown(doc, _TAXONOMY_KEYS, path)
    if "periods" not in doc and default_periods:
        doc = {**doc, "periods": list(default_periods)}
    for axis in ("sectors", "agents", "periods"):
        labels = doc.get(axis)
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise SchemaError(f"{prefix}{axis}", "must be a list of strings")
    tags = doc.get("sector_tags", {})
    if not isinstance(tags, dict):
        raise SchemaError(f"{prefix}sector_tags", "must be an object")
    try:
        return Taxonomy(
            sectors=tuple(doc["sectors"]),
            agents=tuple(doc["agents"]),
            periods=tuple(doc["periods"]),
            sector_tags=tags,
        )
    except ValidationError as exc:
        raise SchemaError(path or "taxonomy", str(exc)) from None


def _parse_indicators(doc, tax: Taxonomy) -> IndicatorParams:
    if not isinstance(doc, dict):
        raise SchemaError("indicators", "must be an object")
    _reject_unknown(doc, _INDICATOR_KEYS, "indicators")
    kwargs = {}
    for name in ("g_star", "pi_star", "okun_b", "u0", "u_min", "u_max",
                 "import_propensity", "noise_sd"):
        if name in doc:
            kwargs[name] = _real(doc[name], f"indicators.{name}")
    if "export_sectors" in doc:
        kwargs["export_sectors"] = _label_list(
            doc["export_sectors"], tax.sector_index, "indicators.export_sectors"
        )
    try:
        return IndicatorParams(**kwargs)
    except ValidationError as exc:
        raise SchemaError("indicators", str(exc)) from None


def _parse_shocks(doc, tax: Taxonomy) -> tuple[Shock, ...]:
    if not isinstance(doc, list):
        raise SchemaError("shocks", "must be a list")
    shocks = []
    for n, entry in enumerate(doc):
        path = f"shocks[{n}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "must be an object")
        _reject_unknown(entry, _SHOCK_KEYS, path)
        for key in _SHOCK_KEYS:
            if key not in entry:
                raise SchemaError(f"{path}.{key}", "missing required field")
        try:
            shock = Shock(
                kind=entry["kind"],
                start_step=_integer(entry["start_step"], f"{path}.start_step"),
                duration=_integer(entry["duration"], f"{path}.duration"),
                severity=_real(entry["severity"], f"{path}.severity"),
            )
        except ValidationError as exc:
            raise SchemaError(path, str(exc)) from None
        if shock.kind == "green_transition":
            if not tax.sectors_tagged("brown") or not tax.sectors_tagged("green"):
                raise SchemaError(
                    path,
                    "green_transition requires taxonomy sectors tagged "
                    "both 'brown' and 'green'",
                )
        shocks.append(shock)
    return tuple(shocks)


def _parse_schedule(doc, tax: Taxonomy, steps: int) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("schedule", "must be an object keyed by step index")
    schedule = {}
    for key, entries in doc.items():
        path = f"schedule.{key}"
        try:
            step = int(key)
        except ValueError:
            raise SchemaError(path, "key must be a decimal step index") from None
        if not 0 <= step < steps:
            raise SchemaError(path, f"step index out of range 0..{steps - 1}")
        if not isinstance(entries, list):
            raise SchemaError(path, "must be a list of actions")
        schedule[step] = tuple(
            parse_action_json(entry, tax, f"{path}[{n}]")
            for n, entry in enumerate(entries)
        )
    return schedule


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"must be a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(path, "must be finite")
    return value


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"must be an integer, got {type(value).__name__}")
    return value


def _label_list(value, lookup, path: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise SchemaError(path, "must be a list of labels")
    indices = []
    for label in value:
        try:
            indices.append(lookup(label))
        except ValidationError as exc:
            raise SchemaError(path, str(exc)) from None
    return tuple(indices)


def _matrix_entry(value, shape: tuple[int, int], path: str) -> np.ndarray:
    if isinstance(value, bool):
        raise SchemaError(path, "must be a number or nested list")
    if isinstance(value, (int, float)):
        return np.full(shape, _real(value, path))
    if isinstance(value, list):
        try:
            arr = np.asarray(value, dtype=np.float64)
        except (TypeError, ValueError):
            raise SchemaError(path, "must be a rectangular nested list of numbers") from None
        if arr.shape != shape:
            raise SchemaError(path, f"expected shape {shape}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise SchemaError(path, "entries must be finite")
        return arr
    raise SchemaError(path, "must be a number or nested list")
