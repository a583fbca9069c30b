"""EcoloRankings from packed orderings, volume rankings, and year series."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import EcotradeError
from .nestedness import NestednessResult

SCHEMES = ("ecolo", "volume")


@dataclass(frozen=True)
class RankEntry:
    rank: int
    label: str
    score: float


@dataclass(frozen=True)
class RankTable:
    year: int
    flow: str
    scheme: str
    entries: tuple[RankEntry, ...]
    axis: str = "countries"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise EcotradeError(f"unknown ranking scheme {self.scheme!r}")
        labels = [e.label for e in self.entries]
        if len(set(labels)) != len(labels):
            raise EcotradeError("rank table labels must be unique")
        if [e.rank for e in self.entries] != list(range(1, len(self.entries) + 1)):
            raise EcotradeError("ranks must run 1..N")

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    def rank_of(self, label: str) -> int | None:
        for e in self.entries:
            if e.label == label:
                return e.rank
        return None

    def to_rows(self) -> list[dict]:
        return [{"rank": e.rank, "label": e.label, "score": e.score} for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "label", "score"])
        for e in self.entries:
            w.writerow([e.rank, e.label, repr(float(e.score))])
        return buf.getvalue()


def _table(year, flow, scheme, axis, labelled_scores) -> RankTable:
    entries = tuple(RankEntry(i + 1, lab, float(score)) for i, (lab, score) in enumerate(labelled_scores))
    return RankTable(year, flow, scheme, entries, axis)


def _tail(dropped, volumes: Mapping[str, float]):
    return sorted(dropped, key=lambda lab: (-volumes.get(lab, 0.0), lab))


def ecolo_rank(result: NestednessResult, dropped_rows: Sequence[str], dropped_cols: Sequence[str],
               volumes: Mapping[str, float], *, col_volumes: Mapping[str, float] | None = None,
               year: int = 0, flow: str = "import") -> tuple[RankTable, RankTable]:
    """Country and product EcoloRank tables.

    Packed rows (countries) and columns (products) are ranked top-left first.
    Labels trimmed away before packing follow, by descending USD volume then
    label. The score is the 1-based position in this combined sequence.
    """
    col_volumes = volumes if col_volumes is None else col_volumes
    rows = list(result.row_labels) + _tail(dropped_rows, volumes)
    cols = list(result.col_labels) + _tail(dropped_cols, col_volumes)
    return (_table(year, flow, "ecolo", "countries", [(lab, i + 1) for i, lab in enumerate(rows)]),
            _table(year, flow, "ecolo", "products", [(lab, j + 1) for j, lab in enumerate(cols)]))


def axis_totals(usd_matrix, products: Sequence[str], countries: Sequence[str], axis: str) -> dict[str, float]:
    """USD totals per label of a product x country matrix along ``axis``."""
    m = np.asarray(usd_matrix, dtype=float)
    if axis == "countries":
        return {lab: math.fsum(m[:, j]) for j, lab in enumerate(countries)}
    if axis == "products":
        return {lab: math.fsum(m[i, :]) for i, lab in enumerate(products)}
    raise EcotradeError(f"unknown axis {axis!r}")


def volume_rank(usd_matrix, products: Sequence[str], countries: Sequence[str], axis: str,
                *, year: int = 0, flow: str = "import") -> RankTable:
    """Rank labels by descending USD total along ``axis``, ties by label."""
    if np.any(np.asarray(usd_matrix) < 0):
        raise EcotradeError("volume ranking needs a nonnegative matrix")
    totals = axis_totals(usd_matrix, products, countries, axis)
    ordered = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return _table(year, flow, "volume", axis, ordered)


@dataclass(frozen=True)
class RankSeries:
    scheme: str
    flow: str
    years: tuple[int, ...]
    tables: Mapping[int, RankTable] = field(repr=False)
    axis: str = "countries"

    @property
    def labels(self) -> list[str]:
        """Every label seen in any year, by best rank reached then label."""
        best: dict[str, int] = {}
        for t in self.tables.values():
            for e in t.entries:
                best[e.label] = min(best.get(e.label, e.rank), e.rank)
        return sorted(best, key=lambda lab: (best[lab], lab))

    def rank(self, label: str, year: int) -> int | None:
        return self.tables[year].rank_of(label)

    def top_k(self, k: int) -> list[tuple[int, str, int | None]]:
        """``(year, label, rank)`` rows: each year's top k, plus empty-rank rows
        for labels in some other year's top k that are absent from this year."""
        featured = {e.label for t in self.tables.values() for e in t.entries[:k]}
        rows = []
        for year in self.years:
            table = self.tables[year]
            present = set(table.labels)
            rows += [(year, e.label, e.rank) for e in table.entries[:k]]
            rows += [(year, lab, None) for lab in sorted(featured - present)]
        return rows


def rank_series(tables: Sequence[RankTable]) -> RankSeries:
    if not tables:
        raise EcotradeError("rank series needs at least one table")
    kinds = {(t.scheme, t.flow, t.axis) for t in tables}
    if len(kinds) > 1:
        raise EcotradeError(f"mixed schemes in rank series: {sorted(kinds)}")
    by_year: dict[int, RankTable] = {}
    for t in tables:
        if t.year in by_year:
            raise EcotradeError(f"duplicate year {t.year} in rank series")
        by_year[t.year] = t
    scheme, flow, axis = kinds.pop()
    years = tuple(sorted(by_year))
    return RankSeries(scheme, flow, years, {y: by_year[y] for y in years}, axis)
