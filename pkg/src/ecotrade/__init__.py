"""Nestedness analysis of bipartite trade networks."""
from .errors import EcotradeError
from .ingest import TradeMatrixPair, TradeRecord, build_year, read_records
from .mutualistic import BinaryMatrix, fill_fraction, threshold, threshold_pair, trim_empty
from .nestedness import NestednessResult, OptimizerBudget, Ordering, analyze, pack, temperature
from .nulls import null_ensemble, perfect_nested, random_matrix
from .rankings import RankSeries, RankTable, ecolo_rank, rank_series, volume_rank

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix", "EcotradeError", "NestednessResult", "OptimizerBudget", "Ordering",
    "RankSeries", "RankTable", "TradeMatrixPair", "TradeRecord", "analyze", "build_year",
    "ecolo_rank", "fill_fraction", "null_ensemble", "pack", "perfect_nested", "random_matrix",
    "rank_series", "read_records", "temperature", "threshold", "threshold_pair", "trim_empty",
    "volume_rank",
]
