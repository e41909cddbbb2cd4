"""Graph auto-encoder clustering with an adaptively rebuilt sparse graph."""

from .clustering import ClusteringResult, kmeans, spectral_clustering
from .data import SyntheticSpec, generate_synthetic, load_dataset, minmax_scale
from .errors import (AdaGAEError, ConfigError, DegenerateGraphError, DivergenceError,
                     InvalidInputError, NumericError)
from .gae import EncoderConfig, GaeParams, decode, encode, fit, loss
from .graph import (WeightedGraph, build_distribution, build_graph, pairwise_sq_distances,
                    solve_connectivity_row, symmetrize)
from .metrics import accuracy, nmi
from .trainer import RunResult, TrainConfig, run, sparsity_schedule

__version__ = "0.1.0"

__all__ = [
    "AdaGAEError", "ClusteringResult", "ConfigError", "DegenerateGraphError", "DivergenceError",
    "EncoderConfig", "GaeParams", "InvalidInputError", "NumericError", "RunResult",
    "SyntheticSpec", "TrainConfig", "WeightedGraph", "accuracy", "build_distribution",
    "build_graph", "decode", "encode", "fit", "generate_synthetic", "kmeans", "load_dataset",
    "loss", "minmax_scale", "nmi", "pairwise_sq_distances", "run", "solve_connectivity_row",
    "sparsity_schedule", "spectral_clustering", "symmetrize",
]
