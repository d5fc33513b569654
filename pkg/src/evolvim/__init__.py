"""Influence maximization for networks that keep growing.

Seeds are chosen on the current graph to maximize Independent Cascade spread
on its future, predicted by Forest Fire evolution.
"""
from evolvim._backend import BACKEND
from evolvim.bench import (
    ExperimentConfig,
    ExperimentReport,
    generate_synthetic,
    rank_scatter,
    run_comparison,
    theorem1_scenario,
)
from evolvim.cascade import CascadeConfig, SpreadEstimate, estimate_spread, exact_spread
from evolvim.evolution import FfmParams, evolve, fit_parameters, grow
from evolvim.graph import Graph, TemporalGraph, load_edge_list, snapshot_at
from evolvim.rrset import RRCollection, ThetaConfig, compute_theta, max_coverage_select
from evolvim.seeds import RankedSeedSet
from evolvim.selection import (
    GenieConfig,
    SeerConfig,
    aggregate_ranks,
    select_degree,
    select_genie,
    select_greedy_static,
    select_rr_static,
    select_seer,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CascadeConfig",
    "ExperimentConfig",
    "ExperimentReport",
    "FfmParams",
    "GenieConfig",
    "Graph",
    "RRCollection",
    "RankedSeedSet",
    "SeerConfig",
    "SpreadEstimate",
    "TemporalGraph",
    "ThetaConfig",
    "aggregate_ranks",
    "compute_theta",
    "estimate_spread",
    "evolve",
    "exact_spread",
    "fit_parameters",
    "generate_synthetic",
    "grow",
    "load_edge_list",
    "max_coverage_select",
    "rank_scatter",
    "run_comparison",
    "select_degree",
    "select_genie",
    "select_greedy_static",
    "select_rr_static",
    "select_seer",
    "snapshot_at",
    "theorem1_scenario",
]
