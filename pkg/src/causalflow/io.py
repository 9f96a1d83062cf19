"""File formats: JSON specs and reports, CSV panels, DOT graphs.

All JSON documents carry ``"schema": "causalflow/v1"``.  CSV panels are UTF-8
with a header row of channel names, one row per time step, '.' decimal
separator, and 17 significant digits so float64 values round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import ARProcessSpec, CausalGraph, MeasureReport, TimeSeriesPanel

SCHEMA = "causalflow/v1"
CSV_FMT = "%.17g"


def spec_to_dict(spec: ARProcessSpec) -> dict:
    return {
        "schema": SCHEMA,
        "channels": list(spec.channel_names),
        "coupling": spec.coupling.tolist(),
        "noise_cov": spec.noise_cov.tolist(),
    }


def spec_from_dict(doc: dict) -> ARProcessSpec:
    try:
        channels = doc["channels"]
        coupling = doc["coupling"]
        noise = doc["noise_cov"]
    except KeyError as missing:
        raise ValueError(f"spec document is missing the {missing} field") from None
    return ARProcessSpec(tuple(channels), np.array(coupling, dtype=float),
                         np.array(noise, dtype=float))


def load_spec(path: "str | Path") -> ARProcessSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def save_spec(spec: ARProcessSpec, path: "str | Path") -> None:
    write_json(spec_to_dict(spec), path)


def save_panel_csv(panel: TimeSeriesPanel, path: "str | Path") -> None:
    header = ",".join(panel.channels)
    np.savetxt(path, panel.data, delimiter=",", header=header, comments="",
               fmt=CSV_FMT, encoding="utf-8")


def load_panel_csv(path: "str | Path") -> TimeSeriesPanel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        channels = tuple(name.strip() for name in header.split(","))
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return TimeSeriesPanel(channels, data)


def report_to_dict(report: MeasureReport, bits: bool = False) -> dict:
    doc = {"schema": SCHEMA}
    doc.update(report.to_dict(bits=bits))
    return doc


def graph_to_dict(graph: CausalGraph) -> dict:
    doc = {"schema": SCHEMA}
    doc.update(graph.to_dict())
    return doc


def graph_to_dot(graph: CausalGraph, name: str = "causal") -> str:
    """DOT rendering: '->' arrows for dynamic edges, dir=none for
    instantaneous ones."""
    lines = [f"digraph {name} {{"]
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for src, dst, w in graph.dynamic_edges:
        lines.append(f'  "{src}" -> "{dst}" [label="{w:.6g}"];')
    for a, b, w in graph.instantaneous_edges:
        lines.append(f'  "{a}" -> "{b}" [dir=none, style=dashed, label="{w:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_json(doc: dict, path: "str | Path") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def write_text(text: str, path: "str | Path") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_csv_table(rows: "list[dict]", columns: "list[str]", path: "str | Path") -> None:
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            value = row[col]
            cells.append(CSV_FMT % value if isinstance(value, float) else str(value))
        lines.append(",".join(cells))
    write_text("\n".join(lines) + "\n", path)
