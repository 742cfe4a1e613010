"""Hyperbolic embedding of distance matrices and networks by strain minimisation."""

__version__ = "0.1.0"

from .baseline import classic_mds
from .embed import (
    EigenSystem,
    EmbeddingError,
    HyperboloidConfig,
    PoincareEmbedding,
    build_cosh_matrix,
    eigendecompose_reduced,
    hydra,
    optimal_strain_value,
    strain,
)
from .geometry import (
    BallPoint,
    hyperbolic_distance,
    lift_to_hyperboloid,
    lorentz_product,
    poincare_distance,
    stereographic_project,
)
from .graphio import Graph, largest_connected_component, load_edge_list, shortest_path_matrix
from .optimize import OptimizerSettings, equiangular_adjust, hydra_plus, minimize_stress, stress

__all__ = [
    "BallPoint",
    "EigenSystem",
    "EmbeddingError",
    "Graph",
    "HyperboloidConfig",
    "OptimizerSettings",
    "PoincareEmbedding",
    "build_cosh_matrix",
    "classic_mds",
    "eigendecompose_reduced",
    "equiangular_adjust",
    "hydra",
    "hydra_plus",
    "hyperbolic_distance",
    "largest_connected_component",
    "lift_to_hyperboloid",
    "load_edge_list",
    "lorentz_product",
    "minimize_stress",
    "optimal_strain_value",
    "poincare_distance",
    "shortest_path_matrix",
    "stereographic_project",
    "strain",
    "stress",
]
