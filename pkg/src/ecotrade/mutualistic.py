"""Binary mutualistic matrices: thresholding, fill fraction and trimming."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EcotradeError, NothingToAnalyzeError

DEFAULT_MU = 1e-3
FLOWS = ("import", "export")


@dataclass(frozen=True)
class BinaryMatrix:
    """Country x product presence matrix.

    ``cells`` is a boolean array of shape ``(len(row_labels), len(col_labels))``.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: np.ndarray
    mu: float | None = None
    flow: str | None = None

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2:
            raise EcotradeError("cells must be a 2-D array")
        if cells.shape != (len(self.row_labels), len(self.col_labels)):
            raise EcotradeError(
                f"cells shape {cells.shape} does not match labels "
                f"({len(self.row_labels)}, {len(self.col_labels)})"
            )
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(self, "cells", cells)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @classmethod
    def from_array(cls, cells, row_labels=None, col_labels=None, **kw) -> "BinaryMatrix":
        """Wrap a bare 0/1 array, inventing zero-padded labels when none are given."""
        cells = np.asarray(cells, dtype=bool)
        r, c = cells.shape
        if row_labels is None:
            row_labels = [f"r{i:0{len(str(max(r - 1, 0)))}d}" for i in range(r)]
        if col_labels is None:
            col_labels = [f"c{j:0{len(str(max(c - 1, 0)))}d}" for j in range(c)]
        return cls(tuple(row_labels), tuple(col_labels), cells, **kw)

    def permuted(self, row_perm, col_perm) -> "BinaryMatrix":
        rp = np.asarray(row_perm, dtype=int)
        cp = np.asarray(col_perm, dtype=int)
        return BinaryMatrix(
            tuple(self.row_labels[i] for i in rp),
            tuple(self.col_labels[j] for j in cp),
            self.cells[np.ix_(rp, cp)],
            self.mu,
            self.flow,
        )


def threshold(matrix, mu: float = DEFAULT_MU, flow: str | None = None, *,
              products=None, countries=None) -> BinaryMatrix:
    """Binarize a normalized product x country matrix at ``mu``.

    Entries ``>= mu`` become 1. The result is transposed so that rows are
    countries and columns are products.
    """
    if not 0 < mu < 1:
        raise EcotradeError(f"threshold mu must lie in (0, 1), got {mu}")
    if flow is not None and flow not in FLOWS:
        raise EcotradeError(f"unknown flow {flow!r}")
    m = np.asarray(matrix, dtype=float)
    n_p, n_c = m.shape
    products = tuple(products) if products is not None else tuple(f"p{i}" for i in range(n_p))
    countries = tuple(countries) if countries is not None else tuple(f"c{j}" for j in range(n_c))
    return BinaryMatrix(countries, products, (m >= mu).T, mu=mu, flow=flow)


def threshold_pair(pair, mu: float = DEFAULT_MU, flow: str = "import") -> BinaryMatrix:
    """Threshold one side of a ``TradeMatrixPair``."""
    if flow not in FLOWS:
        raise EcotradeError(f"unknown flow {flow!r}")
    m = pair.import_matrix if flow == "import" else pair.export_matrix
    return threshold(m, mu, flow, products=pair.products, countries=pair.countries)


def fill_fraction(q: BinaryMatrix) -> float:
    if q.cells.size == 0:
        raise EcotradeError("fill fraction of an empty matrix is undefined")
    return int(q.cells.sum()) / q.cells.size


def trim_empty(q: BinaryMatrix) -> tuple[BinaryMatrix, tuple[str, ...], tuple[str, ...]]:
    """Drop all-zero rows and columns, keeping the survivors' order.

    Returns the trimmed matrix and the dropped row and column labels.
    """
    cells = q.cells
    if not cells.any():
        raise NothingToAnalyzeError("nothing to analyze: matrix has no nonzero element")
    keep_r = cells.any(axis=1)
    keep_c = cells.any(axis=0)
    trimmed = BinaryMatrix(
        tuple(lab for lab, k in zip(q.row_labels, keep_r) if k),
        tuple(lab for lab, k in zip(q.col_labels, keep_c) if k),
        cells[np.ix_(keep_r, keep_c)],
        q.mu,
        q.flow,
    )
    dropped_r = tuple(lab for lab, k in zip(q.row_labels, keep_r) if not k)
    dropped_c = tuple(lab for lab, k in zip(q.col_labels, keep_c) if not k)
    return trimmed, dropped_r, dropped_c
