"""Geometry of the perfect-nestedness isocline.

A matrix of R rows and C columns is mapped onto the unit square, cell (i, j)
centred at ``x = (j + 0.5) / C``, ``y = (i + 0.5) / R`` with y growing
downwards. The presence region is ``y <= 1 - x**p``; a cell on the wrong side
of the curve scores ``(d / D)**2`` where d is its distance to the curve along
the slope +1 line through the cell and D that line's chord in the square.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import IsoclineUndefinedError

# Normalizer of the summed unexpectedness; mean u of U_MAX maps to T = 100.
U_MAX = 0.04145


def isocline_param(fill: float) -> float:
    """Shape parameter p for which the area under ``1 - x**p`` equals ``fill``."""
    if not 0 < fill < 1:
        raise IsoclineUndefinedError(f"isocline undefined for fill {fill}")
    return fill / (1.0 - fill)


def isocline_y(x, p: float):
    return 1.0 - np.power(x, p)


def _intersect(c: np.ndarray, p: float) -> np.ndarray:
    """x where the line ``y = x + c`` crosses ``y = 1 - x**p``.

    The root of ``x + x**p + c - 1`` is bracketed by the chord of the line
    inside the unit square; safeguarded Newton with a bisection fallback.
    """
    c = np.asarray(c, dtype=float)
    lo = np.maximum(0.0, -c)
    hi = np.minimum(1.0, 1.0 - c)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        xp = np.power(x, p)
        f = x + xp + c - 1.0
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            df = 1.0 + p * xp / x
            step = x - f / df
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        new = np.where(bad, 0.5 * (lo + hi), step)
        new = np.where(f == 0, x, new)
        if np.all(np.abs(new - x) <= 1e-16 * np.maximum(1.0, np.abs(x))):
            x = new
            break
        x = new
    return x


def unexpectedness_at(x, y, p: float):
    """Squared relative diagonal distance from point(s) to the isocline.

    Returns the magnitude only, regardless of which side the point lies on.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = y - x
    xi = _intersect(c, p)
    return ((x - xi) / (1.0 - np.abs(c))) ** 2


def cell_unexpectedness(row: int, col: int, n_rows: int, n_cols: int,
                        present: bool, p: float) -> float:
    x = (col + 0.5) / n_cols
    y = (row + 0.5) / n_rows
    inside = y <= 1.0 - x ** p
    if bool(present) == inside:
        return 0.0
    return float(unexpectedness_at(x, y, p))


@lru_cache(maxsize=256)
def _tables(n_rows: int, n_cols: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    y = (np.arange(n_rows)[:, None] + 0.5) / n_rows
    x = (np.arange(n_cols)[None, :] + 0.5) / n_cols
    x, y = np.broadcast_arrays(x, y)
    inside = y <= 1.0 - np.power(x, p)
    g = unexpectedness_at(x, y, p)
    g = np.where(np.abs(g) < 1e-300, 0.0, g)
    if_present = np.where(inside, 0.0, g)
    if_absent = np.where(inside, g, 0.0)
    if_present.setflags(write=False)
    if_absent.setflags(write=False)
    return if_present, if_absent


def position_tables(n_rows: int, n_cols: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-position unexpectedness for a present and for an absent cell.

    Both arrays have shape (n_rows, n_cols) and are read-only.
    """
    return _tables(int(n_rows), int(n_cols), float(p))
