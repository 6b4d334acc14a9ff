"""Render the six indicator series to a figure next to the CSV output.

Works from in-memory frames or from a previously written indicator CSV,
so plots can always be regenerated from the delimited artifact alone.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io_formats import frame_to_json_dict, read_indicator_csv, write_indicator_csv

_PANELS = [
    ("gdp_growth", "GDP growth", "fraction / step"),
    ("inflation", "Inflation", "fraction / step"),
    ("unemployment", "Unemployment", "fraction"),
    ("trade_balance", "Trade balance", "currency / step"),
    ("economic_resistance", "Economic resistance", "resistance"),
]

_ACTION_STYLE = {
    "spending": ("tab:blue", "o"),
    "tax_cut": ("tab:red", "s"),
    "subsidy": ("tab:green", "^"),
}


def records_from_frames(frames) -> list[dict]:
    records = []
    for frame in frames:
        rec = frame_to_json_dict(frame)
        rec["actions"] = [(a["kind"], a["magnitude"]) for a in rec["actions"]]
        records.append(rec)
    return records


def render_indicator_figure(records, path, title: str | None = None) -> Path:
    """2x3 panel figure of the indicator series; returns the written path."""
    path = Path(path)
    steps = [r["step"] for r in records]
    fig, axes = plt.subplots(2, 3, figsize=(13, 7))
    for ax, (key, label, unit) in zip(axes.flat, _PANELS):
        ax.plot(steps, [r[key] for r in records], lw=1.4, color="tab:blue")
        ax.set_title(label, fontsize=10)
        ax.set_xlabel("step", fontsize=8)
        ax.set_ylabel(unit, fontsize=8)
        ax.tick_params(labelsize=8)
        ax.grid(True, alpha=0.3)

    ax = axes.flat[5]
    seen = set()
    for rec in records:
        for kind, magnitude in rec["actions"]:
            color, marker = _ACTION_STYLE[kind]
            ax.scatter(
                rec["step"], magnitude, color=color, marker=marker, s=36,
                label=None if kind in seen else kind,
            )
            seen.add(kind)
    ax.set_title("Agent actions", fontsize=10)
    ax.set_xlabel("step", fontsize=8)
    ax.set_ylabel("magnitude", fontsize=8)
    ax.tick_params(labelsize=8)
    ax.grid(True, alpha=0.3)
    if steps:
        ax.set_xlim(min(steps) - 1, max(steps) + 1)
    if seen:
        ax.legend(fontsize=8)

    if title:
        fig.suptitle(title, fontsize=12)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_report(frames, out_dir, title: str | None = None) -> tuple[Path, Path]:
    """Indicator CSV plus its figure into out_dir; returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "indicators.csv"
    csv_path.write_bytes(write_indicator_csv(frames))
    png_path = render_indicator_figure(
        records_from_frames(frames), out_dir / "indicators.png", title
    )
    return csv_path, png_path


def report_from_csv(data: bytes, out_path, title: str | None = None) -> Path:
    """Figure straight from indicator CSV bytes."""
    return render_indicator_figure(read_indicator_csv(data), out_path, title)
