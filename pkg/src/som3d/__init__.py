"""Simulation and planning toolkit for 3D spectrum-occupancy measurement.

The modules build on one another: ``geometry`` describes the region and its
licensed networks, ``voxel`` discretizes it, ``planecut`` analyzes the error a
single plane boundary induces in one cube, ``planner`` runs the adaptive
measurement survey whose tours come from ``aco``, and ``harness`` wires the
experiments to a command line.
"""

from .aco import AcoParams, Tour, WaypointSet, brute_force_tour, nearest_neighbor_tour, plan_tour
from .geometry import LicensedNetwork, Point3, Scene, boundary_surface_area, detect, radio_parameter_at
from .planecut import PlaneCutParams, cut_area, cut_rpe, predicted_rpe, theorem2_constant
from .planner import (
    Reconstruction,
    SomConfig,
    initial_lattice,
    reconstruction_error,
    run_som,
    snake_traversal,
    theorem3_bound,
)
from .voxel import CubeIndex, GridSpec, OccupancyMap, Provenance, discretization_rpe, ground_truth_map

__version__ = "0.1.0"

__all__ = [
    "AcoParams",
    "CubeIndex",
    "GridSpec",
    "LicensedNetwork",
    "OccupancyMap",
    "PlaneCutParams",
    "Point3",
    "Provenance",
    "Reconstruction",
    "Scene",
    "SomConfig",
    "Tour",
    "WaypointSet",
    "boundary_surface_area",
    "brute_force_tour",
    "cut_area",
    "cut_rpe",
    "detect",
    "discretization_rpe",
    "ground_truth_map",
    "initial_lattice",
    "nearest_neighbor_tour",
    "plan_tour",
    "predicted_rpe",
    "radio_parameter_at",
    "reconstruction_error",
    "run_som",
    "snake_traversal",
    "theorem2_constant",
    "theorem3_bound",
]
