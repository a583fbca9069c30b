"""Result documents (JSON, CSV) and SVG heatmaps."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .isocline import isocline_y
from .nestedness import NestednessResult, OptimizerBudget
from .rankings import RankSeries, RankTable

SCHEMA_VERSION = 1
PRESENT_COLOR = "#d62728"
ABSENT_COLOR = "#1f4e9c"
ISOCLINE_COLOR = "#2ca02c"


def analysis_document(*, year: int, flow: str, mu: float, phi: float, result: NestednessResult,
                      dropped_rows, dropped_cols, seed: int, budget: OptimizerBudget,
                      tables: dict[str, RankTable]) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "year": year,
        "flow": flow,
        "mu": mu,
        "phi": phi,
        "temperature": result.temperature,
        "eta": result.eta,
        "row_order": list(result.row_labels),
        "col_order": list(result.col_labels),
        "dropped_rows": list(dropped_rows),
        "dropped_cols": list(dropped_cols),
        "seed": seed,
        "budget": budget.to_dict(),
        "trimmed_shape": [len(result.row_labels), len(result.col_labels)],
        "trimmed_fill": result.fill,
        "isocline_p": result.isocline_p,
        "clamped": result.clamped,
        "generations": result.generations,
        "rankings": {name: t.to_rows() for name, t in tables.items()},
    }


def dumps(doc: dict) -> str:
    """Canonical serialization; ``dumps(json.loads(dumps(d))) == dumps(d)``."""
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def series_csv(series_list: list[RankSeries], k: int) -> str:
    rows = []
    for s in series_list:
        rows += [(year, rank, label, s.scheme) for year, label, rank in s.top_k(k)]
    rows.sort(key=lambda r: (r[0], r[3], r[1] is None, r[1] or 0, r[2]))
    return csv_text(["year", "rank", "label", "scheme"], rows)


def heatmap_svg(cells: np.ndarray, row_labels, col_labels, *, fill: float | None = None,
                p: float | None = None, title: str = "", cell_px: float | None = None) -> str:
    """SVG 1.1 picture of a binary matrix with the isocline overlaid in green.

    ``cells`` is drawn as given (row 0 at the top), so pass it in packed order.
    """
    cells = np.asarray(cells, dtype=bool)
    n_r, n_c = cells.shape
    if cell_px is None:
        cell_px = max(2.0, min(16.0, 640.0 / max(n_r, n_c, 1)))
    margin_l, margin_t = 60.0, 30.0 if title else 10.0
    w, h = n_c * cell_px, n_r * cell_px
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{margin_l + w + 10:.1f}" height="{margin_t + h + 40:.1f}">',
    ]
    if title:
        out.append(f'<text x="{margin_l:.1f}" y="18" font-family="sans-serif" font-size="13">{escape(title)}</text>')
    out.append(f'<g transform="translate({margin_l:.1f},{margin_t:.1f})">')
    out.append(f'<rect x="0" y="0" width="{w:.2f}" height="{h:.2f}" fill="{ABSENT_COLOR}"/>')
    for i, j in zip(*np.nonzero(cells)):
        out.append(f'<rect x="{j * cell_px:.2f}" y="{i * cell_px:.2f}" '
                   f'width="{cell_px:.2f}" height="{cell_px:.2f}" fill="{PRESENT_COLOR}"/>')
    if p is not None:
        xs = np.linspace(0.0, 1.0, 201)
        ys = isocline_y(xs, p)
        pts = " ".join(f"{x * w:.2f},{y * h:.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{ISOCLINE_COLOR}" stroke-width="2"/>')
    if cell_px >= 8:
        for i, lab in enumerate(row_labels):
            out.append(f'<text x="-4" y="{(i + 0.75) * cell_px:.2f}" text-anchor="end" '
                       f'font-family="sans-serif" font-size="{cell_px * 0.7:.1f}">{escape(str(lab))}</text>')
    out.append("</g>")
    caption = f"{n_r} x {n_c}"
    if fill is not None:
        caption += f", fill {fill:.3f}"
    out.append(f'<text x="{margin_l:.1f}" y="{margin_t + h + 25:.1f}" font-family="sans-serif" '
               f'font-size="11">{escape(caption)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
