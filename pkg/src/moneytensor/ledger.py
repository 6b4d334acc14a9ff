"""Transaction classification into tensor cells, plus indicator CSV intake.

A transaction carries a scalar amount until it is classified against a
taxonomy, at which point it lands in one (sector, agent, period) cell of
the aggregate money tensor. Classification is strict: an unknown label
aborts the build, because silently dropped rows would corrupt the
conservation property (cell sums == transaction sums).

Per-cell sums use math.fsum, so the built tensor is exactly invariant
under reordering of the input transactions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CsvFormatError, UnknownLabelError, ValidationError
from .tensor_core import Tensor3

# Sector tags the simulator understands; anything else in a taxonomy
# is a typo waiting to skew a shock.
KNOWN_SECTOR_TAGS = frozenset({"service", "green", "brown"})

TRANSACTION_HEADER = ("amount", "sector", "agent", "period")


@dataclass(frozen=True)
class Taxonomy:
    """Ordered label spaces for the three tensor axes.

    Period labels are opaque strings whose declaration order is taken as
    chronological. ``sector_tags`` optionally marks sectors as service /
    green / brown for scenario shocks.
    """

    sectors: tuple[str, ...]
    agents: tuple[str, ...]
    periods: tuple[str, ...]
    sector_tags: dict = field(default_factory=dict)

    def __post_init__(self):
        for axis in ("sectors", "agents", "periods"):
            labels = tuple(getattr(self, axis))
            if not labels:
                raise ValidationError(f"taxonomy {axis} must be non-empty")
            if len(set(labels)) != len(labels):
                raise ValidationError(f"taxonomy {axis} labels must be unique")
            object.__setattr__(self, axis, labels)
        tags = {}
        for label, label_tags in dict(self.sector_tags).items():
            if label not in self.sectors:
                raise ValidationError(f"sector_tags references unknown sector {label!r}")
            label_tags = frozenset(label_tags)
            unknown = label_tags - KNOWN_SECTOR_TAGS
            if unknown:
                raise ValidationError(
                    f"unknown sector tags {sorted(unknown)} on {label!r}; "
                    f"known tags: {sorted(KNOWN_SECTOR_TAGS)}"
                )
            tags[label] = label_tags
        object.__setattr__(self, "sector_tags", tags)
        object.__setattr__(self, "_sector_index", {s: i for i, s in enumerate(self.sectors)})
        object.__setattr__(self, "_agent_index", {a: j for j, a in enumerate(self.agents)})
        object.__setattr__(self, "_period_index", {p: k for k, p in enumerate(self.periods)})

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.n_sectors, self.n_agents, self.n_periods)

    def sector_index(self, label: str) -> int:
        try:
            return self._sector_index[label]
        except KeyError:
            raise UnknownLabelError("sector", label) from None

    def agent_index(self, label: str) -> int:
        try:
            return self._agent_index[label]
        except KeyError:
            raise UnknownLabelError("agent", label) from None

    def period_index(self, label: str) -> int:
        try:
            return self._period_index[label]
        except KeyError:
            raise UnknownLabelError("period", label) from None

    def sectors_tagged(self, tag: str) -> tuple[int, ...]:
        """Indices of sectors carrying the given tag, in axis order."""
        return tuple(
            i for i, s in enumerate(self.sectors) if tag in self.sector_tags.get(s, ())
        )


@dataclass(frozen=True)
class Transaction:
    """One money movement: positive amount plus its three labels."""

    amount: float
    sector: str
    agent: str
    period: str

    def __post_init__(self):
        amount = float(self.amount)
        if not math.isfinite(amount) or amount <= 0:
            raise ValidationError(f"amount must be finite and > 0, got {amount}")
        object.__setattr__(self, "amount", amount)


@dataclass(frozen=True)
class CellIncrement:
    """A classified transaction: tensor cell indices plus the amount."""

    sector_index: int
    agent_index: int
    period_index: int
    amount: float


def classify(txn: Transaction, tax: Taxonomy) -> CellIncrement:
    """Resolve a transaction's labels to cell indices; amount is unchanged."""
    return CellIncrement(
        sector_index=tax.sector_index(txn.sector),
        agent_index=tax.agent_index(txn.agent),
        period_index=tax.period_index(txn.period),
        amount=txn.amount,
    )


def build_tensor(txns, tax: Taxonomy) -> Tensor3:
    """Aggregate money tensor: each cell sums the amounts classified to it.

    Fails on the first unclassifiable transaction, reporting its
    0-based position. Per-cell sums are exactly rounded (math.fsum), so
    the result does not depend on transaction order.
    """
    buckets: dict[tuple[int, int, int], list[float]] = {}
    for n, txn in enumerate(txns):
        try:
            inc = classify(txn, tax)
        except UnknownLabelError as exc:
            raise ValidationError(f"transaction {n}: {exc}") from exc
        key = (inc.sector_index, inc.agent_index, inc.period_index)
        buckets.setdefault(key, []).append(inc.amount)
    values = np.zeros(tax.dims)
    for key, amounts in buckets.items():
        values[key] = math.fsum(amounts)
    return Tensor3(values)


def parse_transactions_csv(data: bytes) -> list[Transaction]:
    """Parse `amount,sector,agent,period` rows into transactions.

    UTF-8, LF or CRLF. Raises CsvFormatError with the 1-based line
    number of the first malformed or non-positive row.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"transactions CSV is not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError(1, "missing header") from None
    if tuple(h.strip() for h in header) != TRANSACTION_HEADER:
        raise CsvFormatError(1, f"expected header {','.join(TRANSACTION_HEADER)}")
    txns = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise CsvFormatError(line, f"expected 4 fields, got {len(row)}")
        raw_amount, sector, agent, period = (f.strip() for f in row)
        try:
            amount = float(raw_amount)
        except ValueError:
            raise CsvFormatError(line, f"bad amount {raw_amount!r}") from None
        if not math.isfinite(amount) or amount <= 0:
            raise CsvFormatError(line, f"amount must be finite and > 0, got {raw_amount}")
        txns.append(Transaction(amount, sector, agent, period))
    return txns


@dataclass(frozen=True)
class IndicatorSeries:
    """Chronological yearly values for one model role; None marks a gap."""

    role: str
    years: tuple[int, ...]
    values: tuple  # float or None per year


def ingest_worldbank_csv(data: bytes, mapping: dict) -> dict:
    """Extract per-role indicator series from a World Bank CSV export.

    ``mapping`` assigns indicator codes to model roles, e.g.
    {"NY.GDP.MKTP.KD.ZG": "gdp_growth_baseline"}. Both the wide export
    layout (one row per indicator, one column per year) and the long
    layout (`indicator,year,value`) are accepted; the layout is detected
    from the header. Missing values stay as explicit None gaps.
    """
    if not mapping:
        raise ValidationError("indicator mapping must not be empty")
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"indicator CSV is not valid UTF-8: {exc}") from exc
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise CsvFormatError(1, "empty file")
    header = [h.strip() for h in rows[0]]
    lowered = [h.lower() for h in header]
    if lowered == ["indicator", "year", "value"]:
        per_code = _parse_long_layout(rows[1:])
    elif any(h.lower() == "indicator code" for h in header):
        per_code = _parse_wide_layout(header, rows[1:])
    else:
        raise CsvFormatError(
            1,
            "unrecognized layout: expected `indicator,year,value` columns "
            "or a wide export with an `Indicator Code` column",
        )
    series = {}
    for code, role in mapping.items():
        if code not in per_code:
            found = sorted(set(mapping[c] for c in mapping if c in per_code))
            raise ValidationError(
                f"role {role!r} missing: indicator {code!r} not in file "
                f"(roles found: {found})"
            )
        points = sorted(per_code[code].items())
        series[role] = IndicatorSeries(
            role=role,
            years=tuple(year for year, _ in points),
            values=tuple(value for _, value in points),
        )
    return series


def _parse_long_layout(rows) -> dict:
    per_code: dict[str, dict[int, object]] = {}
    for n, row in enumerate(rows, start=2):
        if len(row) != 3:
            raise CsvFormatError(n, f"expected 3 fields, got {len(row)}")
        code, raw_year, raw_value = (f.strip() for f in row)
        try:
            year = int(raw_year)
        except ValueError:
            raise CsvFormatError(n, f"bad year {raw_year!r}") from None
        value = None if raw_value == "" else _parse_value(raw_value, n)
        per_code.setdefault(code, {})[year] = value
    return per_code


def _parse_wide_layout(header, rows) -> dict:
    code_col = next(i for i, h in enumerate(header) if h.lower() == "indicator code")
    year_cols = []
    for i, h in enumerate(header):
        stripped = h.strip()
        if stripped.isdigit() and len(stripped) == 4:
            year_cols.append((i, int(stripped)))
    if not year_cols:
        raise CsvFormatError(1, "wide layout has no 4-digit year columns")
    per_code: dict[str, dict[int, object]] = {}
    for n, row in enumerate(rows, start=2):
        if len(row) <= code_col:
            raise CsvFormatError(n, "row shorter than header")
        code = row[code_col].strip()
        cells = per_code.setdefault(code, {})
        for i, year in year_cols:
            raw = row[i].strip() if i < len(row) else ""
            cells[year] = None if raw == "" else _parse_value(raw, n)
    return per_code


def _parse_value(raw: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise CsvFormatError(line, f"bad value {raw!r}") from None
    if not math.isfinite(value):
        raise CsvFormatError(line, f"value must be finite, got {raw}")
    return value
