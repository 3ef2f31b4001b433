"""Hecke trees and spheres on the modular surface, with the p-adic tools around them."""

from .bttree import BTVertex, bt_distance, bt_neighbors, bt_sphere, flow_h_p
from .equidist import EquidistReport, convergence_table, empirical_average
from .hecke import (
    HeckeSphere,
    TreeAddress,
    coset_representatives,
    neighbors,
    order_invariance_check,
    psi,
    sphere_coset,
    sphere_tree,
    walk,
)
from .modsurface import HPoint, IntMatrix2, TestFunction, measure_of, moebius_apply, reduce
from .padic import PAdicValue, Place, abs_at_place, from_rational, product_formula_check
from .solenoid import SolenoidPoint, canonicalize, cylinder_histogram, flow

__all__ = [
    "BTVertex", "bt_distance", "bt_neighbors", "bt_sphere", "flow_h_p",
    "EquidistReport", "convergence_table", "empirical_average",
    "HeckeSphere", "TreeAddress", "coset_representatives", "neighbors", "order_invariance_check",
    "psi", "sphere_coset", "sphere_tree", "walk",
    "HPoint", "IntMatrix2", "TestFunction", "measure_of", "moebius_apply", "reduce",
    "PAdicValue", "Place", "abs_at_place", "from_rational", "product_formula_check",
    "SolenoidPoint", "canonicalize", "cylinder_histogram", "flow",
]
