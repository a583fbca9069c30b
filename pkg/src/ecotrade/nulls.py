"""Random null ensembles with matched shape and fill."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EcotradeError
from .isocline import isocline_param
from .mutualistic import BinaryMatrix
from .nestedness import OptimizerBudget, analyze

HIST_BIN_WIDTH = 1.0


@dataclass(frozen=True)
class NullEnsembleSummary:
    realizations: int
    temperatures: tuple[float, ...]
    mean: float
    std_dev: float
    min: float
    max: float
    histogram: tuple[tuple[float, int], ...]
    matched_shape: tuple[int, int]
    matched_fill: float

    def to_dict(self) -> dict:
        return {
            "realizations": self.realizations,
            "temperatures": list(self.temperatures),
            "mean": self.mean,
            "std_dev": self.std_dev,
            "min": self.min,
            "max": self.max,
            "histogram": [[edge, count] for edge, count in self.histogram],
            "matched_shape": list(self.matched_shape),
            "matched_fill": self.matched_fill,
        }


def realization_seed(master_seed: int, k: int) -> int:
    """Seed of realization k, fixed by (master_seed, k) alone."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(k),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def random_matrix(n_rows: int, n_cols: int, fill: float, seed: int) -> BinaryMatrix:
    """Exactly ``round(fill * R * C)`` ones placed uniformly without replacement."""
    if n_rows < 1 or n_cols < 1:
        raise EcotradeError("null matrix needs at least one row and one column")
    if not 0 < fill <= 1:
        raise EcotradeError(f"fill must lie in (0, 1], got {fill}")
    n = n_rows * n_cols
    ones = int(round(fill * n))
    if ones == 0:
        raise EcotradeError("empty null matrix: fill * R * C rounds to zero")
    rng = np.random.default_rng(seed)
    flat = np.zeros(n, dtype=bool)
    flat[rng.choice(n, size=ones, replace=False)] = True
    return BinaryMatrix.from_array(flat.reshape(n_rows, n_cols))


def perfect_nested(n_rows: int, n_cols: int, fill: float) -> BinaryMatrix:
    """Staircase matrix: a cell is filled iff its centre lies under the isocline for ``fill``."""
    p = isocline_param(fill)
    y = (np.arange(n_rows)[:, None] + 0.5) / n_rows
    x = (np.arange(n_cols)[None, :] + 0.5) / n_cols
    return BinaryMatrix.from_array(y <= 1.0 - np.power(x, p))


def _one(args) -> float:
    n_rows, n_cols, fill, budget, seed = args
    q = random_matrix(n_rows, n_cols, fill, seed)
    res, _, _ = analyze(q, budget, seed)
    return res.temperature


def histogram(temps, width: float = HIST_BIN_WIDTH) -> tuple[tuple[float, int], ...]:
    """Counts per fixed-width bin; bins start at 0 and run to the highest occupied one."""
    counts: dict[int, int] = {}
    for t in temps:
        b = int(math.floor(t / width))
        counts[b] = counts.get(b, 0) + 1
    if not counts:
        return ()
    return tuple((b * width, counts.get(b, 0)) for b in range(0, max(counts) + 1))


def summarize(temps, shape, fill) -> NullEnsembleSummary:
    temps = sorted(float(t) for t in temps)
    arr = np.array(temps)
    return NullEnsembleSummary(
        realizations=len(temps),
        temperatures=tuple(temps),
        mean=math.fsum(temps) / len(temps),
        std_dev=float(arr.std()),
        min=temps[0],
        max=temps[-1],
        histogram=histogram(temps),
        matched_shape=tuple(shape),
        matched_fill=float(fill),
    )


def null_ensemble(n_rows: int, n_cols: int, fill: float, realizations: int = 500,
                  budget: OptimizerBudget | None = None, master_seed: int = 0,
                  workers: int = 1) -> NullEnsembleSummary:
    """Pack ``realizations`` random matrices and summarize their temperatures.

    Each realization draws its matrix and its optimizer stream from
    ``realization_seed(master_seed, k)``, so results do not depend on
    ``workers`` or evaluation order.
    """
    if realizations < 1:
        raise EcotradeError("realizations must be >= 1")
    budget = budget or OptimizerBudget()
    jobs = [(n_rows, n_cols, fill, budget, realization_seed(master_seed, k))
            for k in range(realizations)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            temps = list(pool.map(_one, jobs, chunksize=max(1, realizations // (4 * workers))))
    else:
        temps = [_one(j) for j in jobs]
    return summarize(temps, (n_rows, n_cols), fill)
