"""Synthetic trade datasets in the input CSV schema.

Countries and products get heavy-tailed "sizes" (Pareto, density ~ s**-2).
Every (country, product) pair draws an export and an import capability,
``size_c * size_p * noise``; only pairs whose capability clears ``cutoff``
take part in trade of that product. Each active exporter/importer pair then
trades with a probability growing with both country sizes, for a value of
``size_e * size_i * size_p * noise`` (compressed by ``value_exponent``).
Thresholded matrices come out strongly, but not perfectly, nested.
"""
from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .errors import EcotradeError
from .ingest import HEADER

BASE_USD = 1.0e5

DEFAULTS = dict(countries=40, products=30, years=(2006, 2007, 2008))


def _pareto_sizes(rng: np.random.Generator, n: int) -> np.ndarray:
    # inverse CDF of P(S > s) = 1/s on [1, inf)
    return 1.0 / (1.0 - rng.random(n))


def country_codes(n: int) -> list[str]:
    width = max(3, len(str(n)))
    return [f"C{i:0{width}d}" for i in range(1, n + 1)]


def product_codes(n: int, rng: np.random.Generator) -> list[str]:
    if n > 1000:
        raise EcotradeError("at most 1000 distinct 3-digit product codes")
    return [f"{c:03d}" for c in sorted(rng.choice(1000, size=n, replace=False))]


def generate(countries: int = DEFAULTS["countries"], products: int = DEFAULTS["products"],
             years: Sequence[int] = DEFAULTS["years"], seed: int = 0, *,
             cutoff: float = 40.0, capability_sigma: float = 0.5, partner_scale: float = 0.03,
             value_exponent: float = 0.8, noise_sigma: float = 1.0) -> str:
    """Return the CSV text of a synthetic dataset."""
    if countries < 2 or products < 2:
        raise EcotradeError("need at least 2 countries and 2 products")
    if not years:
        raise EcotradeError("need at least one year")
    rng = np.random.default_rng(seed)
    c_codes = country_codes(countries)
    p_codes = product_codes(products, rng)
    c_size = _pareto_sizes(rng, countries)
    p_size = _pareto_sizes(rng, products)
    exp_noise = rng.lognormal(0.0, capability_sigma, (countries, products))
    imp_noise = rng.lognormal(0.0, capability_sigma, (countries, products))

    out = io.StringIO()
    out.write(",".join(HEADER) + "\n")
    for year in years:
        # slow multiplicative drift of sizes between years
        c_size = c_size * np.exp(rng.normal(0.0, 0.05, countries))
        p_size = p_size * np.exp(rng.normal(0.0, 0.05, products))
        base = np.outer(c_size, p_size)
        can_export = base * exp_noise >= cutoff
        can_import = base * imp_noise >= cutoff
        for p in range(products):
            # the strongest exporter and importer of every product always trade,
            # so even tiny worlds produce records
            top_e, top_i = _top_pair(base[:, p] * exp_noise[:, p], base[:, p] * imp_noise[:, p])
            can_export[top_e, p] = can_import[top_i, p] = True
            ex = np.flatnonzero(can_export[:, p])
            im = np.flatnonzero(can_import[:, p])
            e_idx, i_idx = np.meshgrid(ex, im, indexing="ij")
            e_idx, i_idx = e_idx.ravel(), i_idx.ravel()
            keep = e_idx != i_idx
            e_idx, i_idx = e_idx[keep], i_idx[keep]
            pair_mass = c_size[e_idx] * c_size[i_idx]
            u = rng.random(len(e_idx))
            noise = rng.lognormal(0.0, noise_sigma, len(e_idx))
            trades = (u < 1.0 - np.exp(-partner_scale * pair_mass)) | ((e_idx == top_e) & (i_idx == top_i))
            values = BASE_USD * (pair_mass * p_size[p]) ** value_exponent * noise
            for e, i, v in zip(e_idx[trades], i_idx[trades], values[trades]):
                out.write(f"{year},{p_codes[p]},{c_codes[e]},{c_codes[i]},{v:.2f}\n")
    return out.getvalue()


def _top_pair(export_cap: np.ndarray, import_cap: np.ndarray) -> tuple[int, int]:
    e = int(np.argmax(export_cap))
    ranked = np.argsort(-import_cap, kind="stable")
    i = int(ranked[0]) if ranked[0] != e else int(ranked[1])
    return e, i


def write(path, **kw) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(generate(**kw))
