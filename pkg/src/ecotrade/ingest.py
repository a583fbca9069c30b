"""Trade record parsing and aggregation into per-year import/export matrices.

Input is a plain CSV with header ``year,product,exporter,importer,value_usd``.
Matrices are product-major: ``matrix[p, c]`` for product ``p`` and country ``c``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import DegenerateYearError, EmptyYearError, ParseError

HEADER = ("year", "product", "exporter", "importer", "value_usd")


@dataclass(frozen=True)
class TradeRecord:
    year: int
    product: str
    exporter: str
    importer: str
    value: float


@dataclass(frozen=True)
class FlowTensor:
    year: int
    products: tuple[str, ...]
    countries: tuple[str, ...]
    flows: dict[tuple[str, str, str], float] = field(repr=False)


@dataclass(frozen=True)
class TradeMatrixPair:
    year: int
    products: tuple[str, ...]
    countries: tuple[str, ...]
    import_matrix: np.ndarray
    export_matrix: np.ndarray
    normalizer: float


def parse_records(stream: TextIO | Iterable[str], source: str | None = None) -> list[TradeRecord]:
    """Parse the trade CSV. Raises ParseError carrying the 1-based line number."""
    lines = iter(stream)
    try:
        header = next(lines)
    except StopIteration:
        raise ParseError("missing header line", 1, source) from None
    cols = tuple(h.strip() for h in header.lstrip("﻿").rstrip("\r\n").split(","))
    if cols != HEADER:
        raise ParseError(f"unexpected header {','.join(cols)!r}", 1, source)

    records = []
    for lineno, raw in enumerate(lines, start=2):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        parts = [s.strip() for s in line.split(",")]
        if len(parts) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} columns, got {len(parts)}", lineno, source)
        year_s, product, exporter, importer, value_s = parts
        try:
            year = int(year_s)
        except ValueError:
            raise ParseError(f"non-integer year {year_s!r}", lineno, source) from None
        try:
            value = float(value_s)
        except ValueError:
            raise ParseError(f"non-numeric value {value_s!r}", lineno, source) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {value_s!r}", lineno, source)
        if value < 0:
            raise ParseError(f"negative value {value_s!r}", lineno, source)
        if not product or not exporter or not importer:
            raise ParseError("empty code field", lineno, source)
        records.append(TradeRecord(year, product, exporter, importer, value))
    return records


def read_records(path) -> list[TradeRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_records(fh, source=str(path))


def build_flow_tensor(records: Iterable[TradeRecord], year: int) -> FlowTensor:
    """Collect the records of one year, summing duplicate triples.

    Labels keep first-appearance order. Duplicates are summed with ``math.fsum``
    so the result does not depend on record order.
    """
    products: dict[str, None] = {}
    countries: dict[str, None] = {}
    parts: dict[tuple[str, str, str], list[float]] = defaultdict(list)
    for rec in records:
        if rec.year != year:
            continue
        products.setdefault(rec.product)
        countries.setdefault(rec.exporter)
        countries.setdefault(rec.importer)
        parts[(rec.product, rec.exporter, rec.importer)].append(rec.value)
    if not parts:
        raise EmptyYearError(f"empty year {year}")
    flows = {key: math.fsum(vals) for key, vals in parts.items()}
    return FlowTensor(year, tuple(products), tuple(countries), flows)


def aggregate(tensor: FlowTensor) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(M_import, M_export)`` in USD, each of shape (N_p, N_c).

    ``M_import[p, c]`` is everything of product p flowing into c,
    ``M_export[p, c]`` everything flowing out of c.
    """
    p_idx = {p: i for i, p in enumerate(tensor.products)}
    c_idx = {c: i for i, c in enumerate(tensor.countries)}
    imp: dict[tuple[int, int], list[float]] = defaultdict(list)
    exp: dict[tuple[int, int], list[float]] = defaultdict(list)
    # canonical order so the per-cell lists are identical for shuffled inputs
    for (p, src, dst) in sorted(tensor.flows):
        v = tensor.flows[(p, src, dst)]
        imp[(p_idx[p], c_idx[dst])].append(v)
        exp[(p_idx[p], c_idx[src])].append(v)

    shape = (len(tensor.products), len(tensor.countries))
    m_imp = np.zeros(shape)
    m_exp = np.zeros(shape)
    for (i, j), vals in imp.items():
        m_imp[i, j] = math.fsum(vals)
    for (i, j), vals in exp.items():
        m_exp[i, j] = math.fsum(vals)
    return m_imp, m_exp


def normalize(import_usd: np.ndarray, export_usd: np.ndarray, *, year: int = 0,
              products=(), countries=()) -> TradeMatrixPair:
    """Divide both matrices by their shared maximum entry."""
    m_max = float(max(np.max(import_usd, initial=0.0), np.max(export_usd, initial=0.0)))
    if not m_max > 0:
        raise DegenerateYearError(f"degenerate year {year}: no positive trade value")
    return TradeMatrixPair(
        year=year,
        products=tuple(products),
        countries=tuple(countries),
        import_matrix=import_usd / m_max,
        export_matrix=export_usd / m_max,
        normalizer=m_max,
    )


def build_year(records: Iterable[TradeRecord], year: int) -> tuple[TradeMatrixPair, np.ndarray, np.ndarray]:
    """Full ingestion for one year: normalized pair plus the raw USD matrices."""
    tensor = build_flow_tensor(records, year)
    m_imp, m_exp = aggregate(tensor)
    pair = normalize(m_imp, m_exp, year=year, products=tensor.products, countries=tensor.countries)
    return pair, m_imp, m_exp


def years_present(records: Iterable[TradeRecord]) -> list[int]:
    return sorted({r.year for r in records})
