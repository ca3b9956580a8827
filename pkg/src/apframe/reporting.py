"""Deterministic report files: canonical JSON, CSV traces, minimal SVG plots.

Reports must be byte-identical for identical (config, seed) regardless of
thread count, so everything volatile (timing, host) goes to a separate
metadata file and JSON is serialized canonically (sorted keys, repr floats,
no NaN/inf literals).
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field


def _sanitize(obj):
    """Replace non-finite floats with strings so the JSON stays strict."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, complex):
        return {"re": _sanitize(obj.real), "im": _sanitize(obj.imag)}
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):   # numpy scalar
        return _sanitize(obj.item())
    if hasattr(obj, "tolist"):
        return _sanitize(obj.tolist())
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, indent=1,
                      separators=(",", ": "), allow_nan=False) + "\n"


def config_hash(config_dict) -> str:
    return hashlib.sha256(canonical_json(config_dict).encode()).hexdigest()


@dataclass
class Report:
    """Structured experiment output with embedded provenance."""

    kind: str
    verdict: bool
    estimates: dict
    provenance: dict
    traces: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "estimates": self.estimates,
            "traces": self.traces,
            "provenance": self.provenance,
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(canonical_json(self.to_dict()))


def write_meta(path, started: float, finished: float) -> None:
    """Volatile run metadata, kept out of the deterministic report."""
    meta = {
        "started_unix": started,
        "finished_unix": finished,
        "duration_seconds": finished - started,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(meta, indent=1) + "\n")


def write_csv(path, header, rows) -> None:
    """CSV with repr-formatted floats (deterministic, round-trippable)."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, bool)):
        return str(v)
    return str(v)


# ---------------------------------------------------------------------------
# Minimal SVG line plots (polylines + axes, no dependencies)


def svg_plot(path, xs, series, title="", xlabel="", ylabel="",
             log_x=False, log_y=False, width=720, height=440) -> None:
    """Write a single-panel polyline plot.

    ``series`` maps label -> y array; x values shared.  Log axes apply
    base-10 transforms and drop non-positive points.
    """
    margin = 60
    xs = [float(x) for x in xs]
    data = {}
    for label, ys in series.items():
        pts = []
        for x, y in zip(xs, ys):
            y = float(y)
            if log_x and x <= 0:
                continue
            if log_y and y <= 0:
                continue
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            pts.append((math.log10(x) if log_x else x,
                        math.log10(y) if log_y else y))
        if pts:
            data[label] = pts
    all_pts = [p for pts in data.values() for p in pts]
    if not all_pts:
        all_pts = [(0.0, 0.0), (1.0, 1.0)]
    x_lo = min(p[0] for p in all_pts)
    x_hi = max(p[0] for p in all_pts)
    y_lo = min(p[1] for p in all_pts)
    y_hi = max(p[1] for p in all_pts)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ["#1f6fb2", "#c2423f", "#3d8f46", "#8450a8", "#b07d2b", "#4a4a4a"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 14}" text-anchor="middle" '
        f'font-size="12">{xlabel}{" (log10)" if log_x else ""}</text>',
        f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {height / 2:.1f})">{ylabel}{" (log10)" if log_y else ""}</text>',
    ]
    for n in range(5):
        xv = x_lo + n * (x_hi - x_lo) / 4
        yv = y_lo + n * (y_hi - y_lo) / 4
        parts.append(f'<text x="{sx(xv):.1f}" y="{height - margin + 16}" '
                     f'text-anchor="middle" font-size="10">{xv:.3g}</text>')
        parts.append(f'<text x="{margin - 6}" y="{sy(yv):.1f}" text-anchor="end" '
                     f'font-size="10">{yv:.3g}</text>')
    for i, (label, pts) in enumerate(data.items()):
        color = colors[i % len(colors)]
        poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{poly}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin - 4}" y="{margin + 16 + 16 * i}" '
                     f'text-anchor="end" font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
