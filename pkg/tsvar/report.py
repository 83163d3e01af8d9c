"""Reports of the command line: one model, rendered as text, JSON or CSV."""

from __future__ import annotations

import io
import json
import math
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .timescale import TimeScale, jump_data, modelled_jump_data, scale_properties

MACHINE_FLOAT = ".17g"
HUMAN_FLOAT = ".10g"

Cell = float | int | str | bool | None


class Report(BaseModel):
    """Everything a command reports."""

    command: str
    source: str
    scale: dict[str, Cell] = Field(default_factory=dict)
    values: dict[str, Cell] = Field(default_factory=dict)
    tables: dict[str, list[dict[str, Cell]]] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)
    ok: bool = True
    timings: dict[str, float] | None = None


def plain(value: Any) -> Cell:
    """Convert numpy scalars and enums to plain cells."""
    if isinstance(value, np.generic):
        return value.item()  # type: ignore[no-any-return]
    if isinstance(value, str | bool | int | float) or value is None:
        return value
    return str(value)


def scale_summary(scale: TimeScale) -> dict[str, Cell]:
    """Provenance, kind, size and structure of a scale."""
    properties = scale_properties(scale)
    return {
        "provenance": scale.provenance,
        "kind": str(scale.kind),
        "size": scale.size,
        "a": float(scale.a),
        "b": float(scale.b),
        "isolated": properties.is_isolated,
        "regular": properties.is_regular,
        "modelled_regular": properties.modelled_regular,
    }


def jump_table(scale: TimeScale) -> list[dict[str, Cell]]:
    """σ, ρ, μ, ν and the classes of every point, with the modelled continuum jumps beside them."""
    rows = []
    for t in scale.points:
        sampled, modelled = jump_data(scale, float(t)), modelled_jump_data(scale, float(t))
        rows.append(
            {
                "t": sampled.t,
                "sigma": sampled.sigma,
                "rho": sampled.rho,
                "mu": sampled.mu,
                "nu": sampled.nu,
                "classes": ",".join(sorted(str(item) for item in sampled.classes)),
                "modelled_sigma": modelled.sigma,
                "modelled_rho": modelled.rho,
                "modelled_classes": ",".join(sorted(str(item) for item in modelled.classes)),
            }
        )
    return rows


def _json_text(value: Any, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(key))}: {_json_text(item, indent + 1)}" for key, item in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [f"{inner}{_json_text(item, indent + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, float) and not isinstance(value, bool):
        return format(value, MACHINE_FLOAT) if math.isfinite(value) else "null"
    return json.dumps(value)


def render_json(report: Report) -> str:
    """Render with every float at 17 significant digits."""
    return _json_text(report.model_dump()) + "\n"


def _human(value: Cell) -> str:
    if isinstance(value, float) and not isinstance(value, bool):
        return format(value, HUMAN_FLOAT)
    return "" if value is None else str(value)


def render_text(report: Report) -> str:
    """Render for reading in a terminal."""
    lines = [f"tsvar {report.command} {report.source}"]
    if report.scale:
        lines.append("scale: " + ", ".join(f"{key}={_human(value)}" for key, value in report.scale.items()))
    lines.extend(f"{key}: {_human(value)}" for key, value in report.values.items())
    for name, rows in report.tables.items():
        lines.append("")
        lines.append(f"[{name}]")
        if rows:
            frame = pd.DataFrame(rows)
            lines.append(frame.to_string(index=False, float_format=lambda x: format(x, HUMAN_FLOAT)))
    for note in report.notes:
        lines.append(f"note: {note}")
    if report.timings is not None:
        lines.append("timings: " + ", ".join(f"{key}={value:.3f}s" for key, value in report.timings.items()))
    lines.append(f"status: {'ok' if report.ok else 'FAILED'}")
    return "\n".join(lines) + "\n"


def render_csv(report: Report) -> str:
    """Render the values and every table as CSV blocks headed by a comment line."""
    stream = io.StringIO()
    stream.write("# values\n")
    values = {"command": report.command, "source": report.source, **report.scale, **report.values, "ok": report.ok}
    pd.DataFrame([values]).to_csv(stream, index=False, float_format="%.17g", lineterminator="\n")
    for name, rows in report.tables.items():
        stream.write(f"# {name}\n")
        pd.DataFrame(rows).to_csv(stream, index=False, float_format="%.17g", lineterminator="\n")
    return stream.getvalue()


RENDERERS = {"text": render_text, "json": render_json, "csv": render_csv}


def render(report: Report, output_format: str) -> str:
    """Render a report in the requested format."""
    return RENDERERS[output_format](report)
