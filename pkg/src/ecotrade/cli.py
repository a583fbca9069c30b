"""Command-line interface: ``ecotrade {analyze,sweep-mu,null,rank-series,synth}``."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import report, synth
from .errors import EcotradeError
from .ingest import build_year, read_records, years_present
from .mutualistic import DEFAULT_MU, FLOWS, fill_fraction, threshold_pair
from .nestedness import FAST_NULL_BUDGET, OptimizerBudget, analyze
from .nulls import null_ensemble
from .rankings import axis_totals, ecolo_rank, rank_series, volume_rank

log = logging.getLogger("ecotrade")

TOP_K_COUNTRIES = 20
TOP_K_PRODUCTS = 10


def bundled_fixture() -> Path:
    return Path(str(resources.files("ecotrade") / "data" / "synthetic_wtn.csv"))


@dataclass
class RunConfig:
    input: Path | None = None
    years: list[int] | None = None
    flow: str = "both"
    mu: float = DEFAULT_MU
    seed: int = 0
    budget: OptimizerBudget = field(default_factory=OptimizerBudget)
    realizations: int = 500
    fast_null: bool = False
    out_dir: Path = Path("out")
    svg: bool = False
    volume_order: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise EcotradeError(f"mu must lie in (0, 1), got {self.mu}")
        if self.realizations < 1:
            raise EcotradeError("realizations must be >= 1")
        if self.flow not in (*FLOWS, "both"):
            raise EcotradeError(f"unknown flow {self.flow!r}")

    @property
    def flows(self) -> tuple[str, ...]:
        return FLOWS if self.flow == "both" else (self.flow,)

    @property
    def null_budget(self) -> OptimizerBudget:
        return replace(self.budget, generations=FAST_NULL_BUDGET.generations) if self.fast_null else self.budget


def parse_years(text: str | None) -> list[int] | None:
    """``"2008"``, ``"1962-1965"``, ``"1968,2008"`` or combinations."""
    if not text:
        return None
    years: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(s) for s in part.split("-", 1))
            years.update(range(lo, hi + 1))
        elif part:
            years.add(int(part))
    return sorted(years)


def parse_mu_list(text: str) -> list[float]:
    mus = sorted({float(s) for s in text.split(",") if s.strip()})
    if not mus:
        raise EcotradeError("empty mu list")
    for mu in mus:
        if not 0 < mu < 1:
            raise EcotradeError(f"mu must lie in (0, 1), got {mu}")
    return mus


def _load(cfg: RunConfig):
    records = read_records(cfg.input)
    years = cfg.years if cfg.years is not None else years_present(records)
    return records, years


def _year_data(records, years):
    """Yield ``(year, pair, m_imp, m_exp)`` for every year that has data."""
    for year in years:
        try:
            pair, m_imp, m_exp = build_year(records, year)
        except EcotradeError as exc:
            log.warning("skipping %s: %s", year, exc)
            continue
        yield year, pair, m_imp, m_exp


def _analyze_unit(args):
    year, flow, pair, usd, cfg = args
    q = threshold_pair(pair, cfg.mu, flow)
    phi = fill_fraction(q)
    result, dropped_r, dropped_c = analyze(q, cfg.budget, cfg.seed)
    c_vol = axis_totals(usd, pair.products, pair.countries, "countries")
    p_vol = axis_totals(usd, pair.products, pair.countries, "products")
    eco_c, eco_p = ecolo_rank(result, dropped_r, dropped_c, c_vol, col_volumes=p_vol, year=year, flow=flow)
    vol_c = volume_rank(usd, pair.products, pair.countries, "countries", year=year, flow=flow)
    vol_p = volume_rank(usd, pair.products, pair.countries, "products", year=year, flow=flow)
    tables = {"ecolo_countries": eco_c, "ecolo_products": eco_p,
              "volume_countries": vol_c, "volume_products": vol_p}
    doc = report.analysis_document(year=year, flow=flow, mu=cfg.mu, phi=phi, result=result,
                                   dropped_rows=dropped_r, dropped_cols=dropped_c, seed=cfg.seed,
                                   budget=cfg.budget, tables=tables)
    svg = None
    if cfg.svg:
        if cfg.volume_order:
            rows = sorted(result.row_labels, key=lambda lab: (-c_vol[lab], lab))
            cols = sorted(result.col_labels, key=lambda lab: (-p_vol[lab], lab))
        else:
            rows, cols = result.row_labels, result.col_labels
        r_idx = [q.row_labels.index(lab) for lab in rows]
        c_idx = [q.col_labels.index(lab) for lab in cols]
        svg = report.heatmap_svg(q.cells[np.ix_(r_idx, c_idx)], rows, cols, fill=result.fill,
                                 p=result.isocline_p, title=f"{year} {flow}  mu={cfg.mu:g}  T={result.temperature:.2f}")
    return year, flow, result, tables, doc, svg


def _run_units(units, cfg: RunConfig):
    """Analyze each (year, flow) unit; failures are logged and reported as None."""
    if cfg.jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_safe_unit, units))
    return [_safe_unit(u) for u in units]


def _safe_unit(u):
    try:
        return _analyze_unit(u)
    except EcotradeError as exc:
        log.warning("%s %s: %s", u[0], u[1], exc)
        return None


def _units(cfg: RunConfig):
    records, years = _load(cfg)
    units = []
    for year, pair, m_imp, m_exp in _year_data(records, years):
        for flow in cfg.flows:
            units.append((year, flow, pair, m_imp if flow == "import" else m_exp, cfg))
    return units


def cmd_analyze(cfg: RunConfig) -> int:
    units = _units(cfg)
    outcomes = _run_units(units, cfg)
    index = []
    for out in outcomes:
        if out is None:
            continue
        year, flow, result, tables, doc, svg = out
        stem = f"analysis_{year}_{flow}"
        files = [report.write_text(cfg.out_dir / f"{stem}.json", report.dumps(doc)).name]
        for name, table in tables.items():
            files.append(report.write_text(cfg.out_dir / f"{stem}_{name}.csv", table.to_csv()).name)
        if svg is not None:
            files.append(report.write_text(cfg.out_dir / f"{stem}.svg", svg).name)
        index.append({"year": year, "flow": flow, "temperature": result.temperature, "files": files})
        log.info("%s %s: T=%.3f", year, flow, result.temperature)
    report.write_text(cfg.out_dir / "index.json", report.dumps({"v": report.SCHEMA_VERSION, "runs": index}))
    if not index:
        log.error("no (year, flow) unit could be analyzed")
        return 1
    return 0


def cmd_sweep_mu(cfg: RunConfig, mus: list[float]) -> int:
    records, years = _load(cfg)
    rows = []
    successes = 0
    for year, pair, _, _ in _year_data(records, years):
        for flow in cfg.flows:
            for mu in mus:
                q = threshold_pair(pair, mu, flow)
                phi = fill_fraction(q)
                try:
                    result, _, _ = analyze(q, cfg.budget, cfg.seed)
                except EcotradeError as exc:
                    log.warning("%s %s mu=%g: %s", year, flow, mu, exc)
                    rows.append((year, flow, mu, phi, None, None, str(exc)))
                    continue
                successes += 1
                rows.append((year, flow, mu, phi, result.temperature, result.eta, ""))
    report.write_text(cfg.out_dir / "sweep_mu.csv",
                      report.csv_text(["year", "flow", "mu", "phi", "temperature", "eta", "error"], rows))
    return 0 if successes else 1


def _null_job(cfg: RunConfig, year, flow, shape, fill, observed):
    summary = null_ensemble(*shape, fill, cfg.realizations, cfg.null_budget, cfg.seed, workers=cfg.jobs)
    doc = {"v": report.SCHEMA_VERSION, "year": year, "flow": flow, "mu": cfg.mu,
           "seed": cfg.seed, "budget": cfg.null_budget.to_dict(), **summary.to_dict()}
    if observed is not None:
        doc["observed_temperature"] = observed
        doc["ratio_mean_to_observed"] = summary.mean / observed if observed > 0 else None
    stem = "null" if year is None else f"null_{year}_{flow}"
    report.write_text(cfg.out_dir / f"{stem}.json", report.dumps(doc))
    report.write_text(cfg.out_dir / f"{stem}_hist.csv",
                      report.csv_text(["bin_lower_edge", "count"], summary.histogram))
    return summary


def cmd_null(cfg: RunConfig, shape=None, fill=None) -> int:
    """Null ensembles matched to explicit (rows, cols, fill), or to each year/flow of the input."""
    if shape is not None:
        _null_job(cfg, None, None, shape, fill, None)
        return 0
    records, years = _load(cfg)
    done = 0
    for year, pair, _, _ in _year_data(records, years):
        for flow in cfg.flows:
            q = threshold_pair(pair, cfg.mu, flow)
            try:
                observed, _, _ = analyze(q, cfg.budget, cfg.seed)
                _null_job(cfg, year, flow, q.shape, fill_fraction(q), observed.temperature)
            except EcotradeError as exc:
                log.warning("%s %s: %s", year, flow, exc)
                continue
            done += 1
    return 0 if done else 1


def cmd_rank_series(cfg: RunConfig, top_k: int | None = None) -> int:
    outcomes = [o for o in _run_units(_units(cfg), cfg) if o is not None]
    if not outcomes:
        log.error("no year could be analyzed")
        return 1
    for flow in cfg.flows:
        per_flow = [o for o in outcomes if o[1] == flow]
        if not per_flow:
            continue
        for axis, default_k in (("countries", TOP_K_COUNTRIES), ("products", TOP_K_PRODUCTS)):
            k = top_k if top_k is not None else default_k
            series = [rank_series([o[3][f"{scheme}_{axis}"] for o in per_flow]) for scheme in ("ecolo", "volume")]
            report.write_text(cfg.out_dir / f"rank_series_{flow}_{axis}.csv", report.series_csv(series, k))
    return 0


def cmd_synth(path: Path, countries: int, products: int, years: list[int], seed: int) -> int:
    report.write_text(path, synth.generate(countries=countries, products=products, years=years, seed=seed))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="trade CSV (default: bundled synthetic fixture)")
    common.add_argument("--years", help="e.g. 2008, 1962-2009, 1968,2008")
    common.add_argument("--flow", choices=("import", "export", "both"), default="both")
    common.add_argument("--mu", type=float, default=DEFAULT_MU)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--generations", type=int, default=OptimizerBudget.generations)
    common.add_argument("--stagnation", type=int, default=OptimizerBudget.stagnation)
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ecotrade", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="per-year nestedness, rankings and heatmaps")
    p.add_argument("--svg", action="store_true", help="write an SVG heatmap per year and flow")
    p.add_argument("--volume-order", action="store_true", help="heatmap rows/columns by trade volume")

    p = sub.add_parser("sweep-mu", parents=[common], help="fill and temperature across thresholds")
    p.add_argument("--mu-list", default="1e-6,1e-5,1e-4,1e-3,1e-2")

    p = sub.add_parser("null", parents=[common], help="random null ensembles")
    p.add_argument("--realizations", type=int, default=500)
    p.add_argument("--fast-null", action="store_true", help=f"{FAST_NULL_BUDGET.generations} generations per realization")
    p.add_argument("--rows", type=int, help="explicit null shape instead of matching the input")
    p.add_argument("--cols", type=int)
    p.add_argument("--fill", type=float)

    p = sub.add_parser("rank-series", parents=[common], help="multi-year ranking tables")
    p.add_argument("--top-k", type=int, help=f"default {TOP_K_COUNTRIES} countries, {TOP_K_PRODUCTS} products")

    p = sub.add_parser("synth", help="write a synthetic trade dataset")
    p.add_argument("--countries", type=int, default=synth.DEFAULTS["countries"])
    p.add_argument("--products", type=int, default=synth.DEFAULTS["products"])
    p.add_argument("--years", default=",".join(str(y) for y in synth.DEFAULTS["years"]))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, default=Path("synthetic_wtn.csv"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args.output, args.countries, args.products, parse_years(args.years), args.seed)
        cfg = RunConfig(
            input=args.input or bundled_fixture(),
            years=parse_years(args.years),
            flow=args.flow,
            mu=args.mu,
            seed=args.seed,
            budget=OptimizerBudget(generations=args.generations, stagnation=args.stagnation),
            realizations=getattr(args, "realizations", 500),
            fast_null=getattr(args, "fast_null", False),
            out_dir=args.out_dir,
            svg=getattr(args, "svg", False),
            volume_order=getattr(args, "volume_order", False),
            jobs=args.jobs,
        )
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "sweep-mu":
            return cmd_sweep_mu(cfg, parse_mu_list(args.mu_list))
        if args.command == "null":
            if args.rows is not None or args.cols is not None or args.fill is not None:
                if None in (args.rows, args.cols, args.fill):
                    raise EcotradeError("--rows, --cols and --fill go together")
                return cmd_null(cfg, (args.rows, args.cols), args.fill)
            return cmd_null(cfg)
        if args.command == "rank-series":
            return cmd_rank_series(cfg, args.top_k)
    except (EcotradeError, OSError) as exc:
        log.error("%s", exc)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
