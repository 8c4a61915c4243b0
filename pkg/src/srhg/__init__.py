"""Streaming sweep-line generator for threshold random hyperbolic graphs."""

from .geometry import ModelParams, hyperbolic_distance
from .oracle import compare, materialize_points, naive_edges
from .parallel import GenerationResult, generate, iter_edge_blocks
from .partition import AnnulusLayout, build_layout
from .rng import SeedPath, derive_seed
from .stats import RunReport, build_report, degree_histogram, fingerprint, powerlaw_mle

__all__ = [
    "AnnulusLayout", "GenerationResult", "ModelParams", "RunReport", "SeedPath", "build_layout",
    "build_report", "compare", "degree_histogram", "derive_seed", "fingerprint", "generate",
    "hyperbolic_distance", "iter_edge_blocks", "materialize_points", "naive_edges", "powerlaw_mle",
]
