"""Topological degree and linking numbers of discretized maps."""

from .catalog import CatalogEntry, get
from .degree import (
    DegreeResult,
    degree_sphere_map_kronecker,
    degree_sphere_map_simplicial,
    local_degree_regular,
    verify_multiplication,
)
from .errors import LinkdegError, NotConverged, PreconditionError
from .extension import Mollifier, build_homotopy, det_bound_check, extend, hausdorff_volume_estimate, verify_extension_bounds
from .linking import LinkingResult, gauss_linking_circles, linking_number, verify_linking_invariance
from .mesh import SphereMesh, embed_iota1, embed_iota2, make_product_grid, make_sphere_mesh, reflect_last, surface_area
from .oracle import Ball, Box, MapOracle
from .records import CalibrationState, ResultRecord
from .sobolev import GridFunction, blow_up, chain_rule_check, fubini_slices, good_point_check, maximal_function, w1p_norm

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "Box",
    "CalibrationState",
    "CatalogEntry",
    "DegreeResult",
    "GridFunction",
    "LinkdegError",
    "LinkingResult",
    "MapOracle",
    "Mollifier",
    "NotConverged",
    "PreconditionError",
    "ResultRecord",
    "SphereMesh",
    "blow_up",
    "build_homotopy",
    "chain_rule_check",
    "degree_sphere_map_kronecker",
    "degree_sphere_map_simplicial",
    "det_bound_check",
    "embed_iota1",
    "embed_iota2",
    "extend",
    "fubini_slices",
    "gauss_linking_circles",
    "get",
    "good_point_check",
    "hausdorff_volume_estimate",
    "linking_number",
    "local_degree_regular",
    "make_product_grid",
    "make_sphere_mesh",
    "maximal_function",
    "reflect_last",
    "surface_area",
    "verify_extension_bounds",
    "verify_linking_invariance",
    "verify_multiplication",
    "w1p_norm",
]
