"""Emergency evacuation simulation for disrupted railway networks."""
from .costmatrix import CostMatrix, CostParams, fuse_cost
from .errors import (ContractError, DuplicateStationError, InfeasibleError, InputError, IsolationError,
                     ParseError, RailEvacError, UnknownStationError)
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import BoxStats, MetricsReport, box_stats, compute_metrics
from .network import NetworkModel, Station, connectivity_matrix, distance_matrix, haversine_km, load_network
from .partition import Subproblem, k_nearest_subproblem, solve_partitioned
from .solver import EvacuationPlan, Scenario, Violation, sample_demand, solve, validate_plan
from .travel import TrainTimeMatrix, TravelParams, train_time_matrix

__version__ = "0.1.0"

__all__ = [
    "BoxStats", "ContractError", "CostMatrix", "CostParams", "DuplicateStationError", "EvacuationPlan",
    "InfeasibleError", "InputError", "IsolationError", "KERNEL_BACKEND", "MetricsReport", "NetworkModel",
    "ParseError", "RailEvacError", "Scenario", "Station", "Subproblem", "TrainTimeMatrix", "TravelParams",
    "UnknownStationError", "Violation", "box_stats", "compute_metrics", "connectivity_matrix",
    "distance_matrix", "fuse_cost", "haversine_km", "k_nearest_subproblem", "load_network",
    "sample_demand", "solve", "solve_partitioned", "train_time_matrix", "validate_plan",
]
