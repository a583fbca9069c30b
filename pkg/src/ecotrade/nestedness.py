"""Nestedness temperature and the row/column packing optimizer.

Temperature is the classic nestedness temperature, measured against the
isocline family from :mod:`ecotrade.isocline`. Packing searches row and column permutations
minimizing it: three heuristic seed orderings, a genetic algorithm over
(row permutation, column permutation) pairs, and an alternating
linear-assignment polish applied to the seeds, to the best offspring every
third generation while the search stagnates, and to the final answer.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EcotradeError
from .isocline import U_MAX, isocline_param, position_tables
from .mutualistic import BinaryMatrix, fill_fraction, trim_empty

_EPS = 1e-12
# while stagnating, polish the best offspring every this many generations
_POLISH_EVERY = 3


@dataclass(frozen=True)
class OptimizerBudget:
    generations: int = 200
    stagnation: int = 50
    population: int = 30
    elitism: int = 3

    def __post_init__(self):
        if self.generations < 0 or self.stagnation < 1:
            raise EcotradeError("generations must be >= 0 and stagnation >= 1")
        if self.population < 2 or not 0 < self.elitism < self.population:
            raise EcotradeError("need population >= 2 and 0 < elitism < population")

    def to_dict(self) -> dict:
        return asdict(self)


FAST_NULL_BUDGET = OptimizerBudget(generations=50)


@dataclass(frozen=True)
class Ordering:
    """``row_perm[i]`` is the original row placed at position i (same for columns)."""

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]

    def __post_init__(self):
        for name in ("row_perm", "col_perm"):
            perm = tuple(int(v) for v in getattr(self, name))
            if sorted(perm) != list(range(len(perm))):
                raise EcotradeError(f"{name} is not a permutation: {perm}")
            object.__setattr__(self, name, perm)

    @classmethod
    def identity(cls, n_rows: int, n_cols: int) -> "Ordering":
        return cls(tuple(range(n_rows)), tuple(range(n_cols)))


@dataclass(frozen=True)
class NestednessResult:
    ordering: Ordering
    temperature: float
    eta: float
    fill: float
    unexpectedness: np.ndarray = field(repr=False)
    isocline_p: float | None
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()
    clamped: bool = False
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def generations(self) -> int:
        return max(len(self.history) - 1, 0)


def _to_temperature(u_sum: float, n_cells: int) -> tuple[float, bool]:
    t = 100.0 / U_MAX * u_sum / n_cells
    if t < 0.0:
        return 0.0, True
    if t > 100.0:
        return 100.0, True
    return t, False


def temperature(q: BinaryMatrix, ordering: Ordering | None = None) -> tuple[float, np.ndarray]:
    """Temperature of ``q`` laid out by ``ordering`` and the per-cell map.

    The map is in packed coordinates (``umap[i, j]`` belongs to the cell shown
    at row i, column j). A completely filled matrix scores 0 with an empty map.
    """
    t, umap, _ = _temperature(q, ordering)
    return t, umap


def _temperature(q, ordering):
    cells = q.cells
    if ordering is not None:
        cells = cells[np.ix_(ordering.row_perm, ordering.col_perm)]
    fill = fill_fraction(q)
    if fill == 0.0:
        raise EcotradeError("temperature undefined for an all-zero matrix")
    if fill == 1.0:
        return 0.0, np.zeros((0, 0)), False
    p = isocline_param(fill)
    if_present, if_absent = position_tables(*cells.shape, p)
    umap = np.where(cells, if_present, if_absent)
    t, clamped = _to_temperature(float(umap.sum()), cells.size)
    return t, umap, clamped


class _Objective:
    """Summed unexpectedness of an ordering, vectorized over populations.

    For fixed position tables the score is ``base + sum(Q[rp][:, cp] * W)``.
    """

    def __init__(self, cells: np.ndarray, p: float):
        self.q = cells.astype(np.float64)
        if_present, if_absent = position_tables(*cells.shape, p)
        self.w = if_present - if_absent
        self.base = float(if_absent.sum())

    def __call__(self, rp, cp) -> float:
        return self.base + float(np.sum(self.q[np.ix_(rp, cp)] * self.w))

    def batch(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        gathered = self.q[rows[:, :, None], cols[:, None, :]]
        return self.base + np.einsum("kij,ij->k", gathered, self.w)

    def row_costs(self, cp) -> np.ndarray:
        # cost[r, i]: original row r at position i, columns fixed
        return self.q[:, cp] @ self.w.T

    def col_costs(self, rp) -> np.ndarray:
        return self.q[rp, :].T @ self.w


def _polish(obj: _Objective, rp: np.ndarray, cp: np.ndarray, cost: float,
            max_rounds: int = 100):
    """Alternate optimal row and column assignments until neither improves."""
    for _ in range(max_rounds):
        improved = False
        r_idx, pos = linear_sum_assignment(obj.row_costs(cp))
        cand = np.empty_like(rp)
        cand[pos] = r_idx
        c_new = obj(cand, cp)
        if c_new < cost - _EPS:
            rp, cost, improved = cand, c_new, True
        c_idx, pos = linear_sum_assignment(obj.col_costs(rp))
        cand = np.empty_like(cp)
        cand[pos] = c_idx
        c_new = obj(rp, cand)
        if c_new < cost - _EPS:
            cp, cost, improved = cand, c_new, True
        if not improved:
            break
    return rp, cp, cost


def _degree_seed(cells: np.ndarray):
    n_r, n_c = cells.shape
    rdeg = cells.sum(axis=1)
    cdeg = cells.sum(axis=0)
    # lexsort: last key is primary; index breaks ties (canonical label order)
    rp = np.lexsort((np.arange(n_r), -rdeg))
    cp = np.lexsort((np.arange(n_c), -cdeg))
    return rp, cp


def _marginal_seed(cells: np.ndarray, rp0: np.ndarray, cp0: np.ndarray):
    n_r, n_c = cells.shape
    rdeg = cells.sum(axis=1)
    cdeg = cells.sum(axis=0)
    col_pos = np.empty(n_c)
    col_pos[cp0] = np.arange(n_c)
    row_pos = np.empty(n_r)
    row_pos[rp0] = np.arange(n_r)
    with np.errstate(invalid="ignore", divide="ignore"):
        r_mean = np.where(rdeg > 0, (cells * col_pos[None, :]).sum(axis=1) / np.maximum(rdeg, 1), n_c)
        c_mean = np.where(cdeg > 0, (cells * row_pos[:, None]).sum(axis=0) / np.maximum(cdeg, 1), n_r)
    rp = np.lexsort((np.arange(n_r), r_mean, -rdeg))
    cp = np.lexsort((np.arange(n_c), c_mean, -cdeg))
    return rp, cp


def _greedy_seed(obj: _Objective, cp0: np.ndarray):
    """Fill positions top to bottom with the cheapest remaining row, then columns."""
    n_r, n_c = obj.q.shape
    costs = obj.row_costs(cp0)
    rp = np.empty(n_r, dtype=int)
    free = np.ones(n_r, dtype=bool)
    for i in range(n_r):
        col = np.where(free, costs[:, i], np.inf)
        r = int(np.argmin(col))
        rp[i] = r
        free[r] = False
    costs = obj.col_costs(rp)
    cp = np.empty(n_c, dtype=int)
    free = np.ones(n_c, dtype=bool)
    for j in range(n_c):
        col = np.where(free, costs[:, j], np.inf)
        c = int(np.argmin(col))
        cp[j] = c
        free[c] = False
    return rp, cp


def order_crossover(p1, p2, a: int, b: int) -> list[int]:
    """Davis order crossover with cut points ``a <= b``.

    The child keeps ``p1[a:b]`` in place; remaining slots, starting at ``b`` and
    wrapping around, take the missing genes in the order they appear in ``p2``
    read from ``b``.
    """
    n = len(p1)
    seg = list(p1[a:b])
    taken = set(seg)
    p2 = list(p2)
    rest = [g for g in p2[b:] + p2[:b] if g not in taken]
    child = [0] * n
    child[a:b] = seg
    for k, g in enumerate(rest):
        child[(b + k) % n] = g
    return child


def swap_mutation(perm, hits, partners) -> list[int]:
    """Swap ``perm[i]`` with ``perm[j]`` for each drawn pair, in order."""
    perm = list(perm)
    for i, j in zip(hits, partners):
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def _breed(rows: list, cols: list, costs: np.ndarray, n_children: int,
           rng: np.random.Generator) -> tuple[list, list]:
    """One generation of offspring; every random draw happens up front."""
    size = len(rows)
    n_r, n_c = len(rows[0]), len(cols[0])
    entrants = rng.integers(size, size=(n_children, 2, 3))
    r_cuts = np.sort(rng.integers(n_r + 1, size=(n_children, 2)), axis=1)
    c_cuts = np.sort(rng.integers(n_c + 1, size=(n_children, 2)), axis=1)
    r_hits = rng.random((n_children, n_r)) < min(1.0, 2.0 / n_r)
    c_hits = rng.random((n_children, n_c)) < min(1.0, 2.0 / n_c)
    r_partner = rng.integers(n_r, size=(n_children, n_r))
    c_partner = rng.integers(n_c, size=(n_children, n_c))

    winners = np.take_along_axis(entrants, np.argmin(costs[entrants], axis=2)[..., None], axis=2)[..., 0]
    new_rows, new_cols = [], []
    for k in range(n_children):
        a, b = winners[k]
        child = order_crossover(rows[a], rows[b], *r_cuts[k])
        hits = np.flatnonzero(r_hits[k])
        new_rows.append(swap_mutation(child, hits, r_partner[k, hits]))
        child = order_crossover(cols[a], cols[b], *c_cuts[k])
        hits = np.flatnonzero(c_hits[k])
        new_cols.append(swap_mutation(child, hits, c_partner[k, hits]))
    return new_rows, new_cols


def _single_axis(cells: np.ndarray):
    """With one row or one column the optimum just moves presences first."""
    n_r, n_c = cells.shape
    if n_r == 1:
        cp = np.lexsort((np.arange(n_c), ~cells[0]))
        return np.zeros(1, dtype=int), cp
    rp = np.lexsort((np.arange(n_r), ~cells[:, 0]))
    return rp, np.zeros(1, dtype=int)


def _search(cells: np.ndarray, p: float, budget: OptimizerBudget, seed: int):
    obj = _Objective(cells, p)
    n_r, n_c = cells.shape
    rng = np.random.default_rng(seed)

    rp1, cp1 = _degree_seed(cells)
    rp2, cp2 = _marginal_seed(cells, rp1, cp1)
    rp3, cp3 = _greedy_seed(obj, cp1)
    seeds = [(rp1, cp1), (rp2, cp2), (rp3, cp3)]

    rows = [s[0] for s in seeds]
    cols = [s[1] for s in seeds]
    for rp, cp in seeds:
        prp, pcp, _ = _polish(obj, rp, cp, obj(rp, cp))
        rows.append(prp)
        cols.append(pcp)
    while len(rows) < budget.population:
        rows.append(rng.permutation(n_r))
        cols.append(rng.permutation(n_c))
    rows_a = np.array(rows[: budget.population])
    cols_a = np.array(cols[: budget.population])
    costs = obj.batch(rows_a, cols_a)

    best = int(np.argmin(costs))
    best_rp, best_cp, best_cost = rows_a[best].copy(), cols_a[best].copy(), float(costs[best])
    history = [best_cost]
    stagnant = 0
    size = budget.population

    for _ in range(budget.generations):
        if best_cost <= 0.0 or stagnant >= budget.stagnation:
            break
        ranked = np.lexsort((np.arange(size), costs))
        elite = ranked[: budget.elitism]
        kids_r, kids_c = _breed(list(rows_a), list(cols_a), costs, size - budget.elitism, rng)
        rows_a = np.concatenate([rows_a[elite], np.array(kids_r, dtype=int)])
        cols_a = np.concatenate([cols_a[elite], np.array(kids_c, dtype=int)])
        costs = obj.batch(rows_a, cols_a)

        if stagnant % _POLISH_EVERY == _POLISH_EVERY - 1:
            kid = budget.elitism + int(np.argmin(costs[budget.elitism:]))
            rp, cp, c = _polish(obj, rows_a[kid], cols_a[kid], float(costs[kid]))
            rows_a[kid], cols_a[kid], costs[kid] = rp, cp, c

        gen_best = int(np.argmin(costs))
        if costs[gen_best] < best_cost - _EPS:
            best_rp, best_cp, best_cost = rows_a[gen_best].copy(), cols_a[gen_best].copy(), float(costs[gen_best])
            stagnant = 0
        else:
            stagnant += 1
        history.append(best_cost)
    rp, cp, c = _polish(obj, best_rp, best_cp, best_cost)
    if c < best_cost - _EPS:
        best_rp, best_cp = rp, cp
        history[-1] = c
    return best_rp, best_cp, history


def pack(q: BinaryMatrix, budget: OptimizerBudget | None = None, seed: int = 0) -> NestednessResult:
    """Find row/column orderings minimizing the temperature of a trimmed matrix.

    The search runs on the matrix sorted by label, so relabelled or shuffled
    copies of the same matrix get the same answer for the same seed.
    """
    budget = budget or OptimizerBudget()
    cells = q.cells
    n_r, n_c = cells.shape
    if cells.size == 0 or not cells.any():
        raise EcotradeError("pack needs a nonempty matrix with at least one presence")
    fill = fill_fraction(q)
    if fill == 1.0:
        return _result(q, Ordering.identity(n_r, n_c), None, [0.0])

    r_canon = np.array(sorted(range(n_r), key=lambda i: q.row_labels[i]), dtype=int)
    c_canon = np.array(sorted(range(n_c), key=lambda j: q.col_labels[j]), dtype=int)
    canon = cells[np.ix_(r_canon, c_canon)]
    p = isocline_param(fill)

    if n_r == 1 or n_c == 1:
        rp, cp = _single_axis(canon)
        obj = _Objective(canon, p)
        history = [obj(rp, cp)]
    else:
        rp, cp, history = _search(canon, p, budget, seed)
    ordering = Ordering(tuple(r_canon[rp]), tuple(c_canon[cp]))
    return _result(q, ordering, p, history)


def _result(q, ordering, p, history):
    t, umap, clamped = _temperature(q, ordering)
    n_cells = q.cells.size
    hist_t = tuple(_to_temperature(h, n_cells)[0] for h in history)
    return NestednessResult(
        ordering=ordering,
        temperature=t,
        eta=1.0 - t / 100.0,
        fill=fill_fraction(q),
        unexpectedness=umap,
        isocline_p=p,
        row_labels=tuple(q.row_labels[i] for i in ordering.row_perm),
        col_labels=tuple(q.col_labels[j] for j in ordering.col_perm),
        clamped=clamped,
        history=hist_t,
    )


def analyze(q: BinaryMatrix, budget: OptimizerBudget | None = None, seed: int = 0):
    """Trim empty lines and pack. Returns ``(result, dropped_rows, dropped_cols)``.

    The result's ordering indexes the trimmed matrix; its ``row_labels`` and
    ``col_labels`` give the packed label sequence directly.
    """
    trimmed, dropped_r, dropped_c = trim_empty(q)
    return pack(trimmed, budget, seed), dropped_r, dropped_c

