"""Exact Hausdorff and packing measures of linear self-similar sets with
overlaps, via finite overlap-type structure and certified interval
arithmetic."""

from .density import (
    BoundaryDensities,
    DensityWitness,
    EdgeAnchors,
    ExtremalDensity,
    IslandTree,
    boundary_densities,
    commensurability,
    compute_dmax,
    compute_dmin,
    dist_to_attractor,
    edge_anchors,
    search_field_max,
)
from .generation import FrameStats, GenerationFrame, Island, build_frame, build_frames, frame_stats
from .ifs import AffineMap, IFSSpec, compose_word, parse_spec, parse_spec_file, spec_from_ratios
from .measure import (
    MeasureModel,
    build_measure_model,
    interval_measure,
    principal_vector,
    solve_dimension,
)
from .numerics import CertifiedReal, Rational, pow_certified, solve_monotone_root
from .overlap import (
    IncidenceTemplate,
    TypeTable,
    check_irreducible,
    classify_types,
    incidence_template,
)
from .verify import assumption_report, brute_force_extremum, check_assumption_a, check_assumption_b

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BoundaryDensities",
    "CertifiedReal",
    "DensityWitness",
    "EdgeAnchors",
    "ExtremalDensity",
    "FrameStats",
    "GenerationFrame",
    "IFSSpec",
    "IncidenceTemplate",
    "Island",
    "IslandTree",
    "MeasureModel",
    "Rational",
    "TypeTable",
    "assumption_report",
    "boundary_densities",
    "brute_force_extremum",
    "build_frame",
    "build_frames",
    "build_measure_model",
    "check_assumption_a",
    "check_assumption_b",
    "check_irreducible",
    "classify_types",
    "commensurability",
    "compose_word",
    "compute_dmax",
    "compute_dmin",
    "dist_to_attractor",
    "edge_anchors",
    "frame_stats",
    "incidence_template",
    "interval_measure",
    "parse_spec",
    "parse_spec_file",
    "pow_certified",
    "principal_vector",
    "search_field_max",
    "solve_dimension",
    "solve_monotone_root",
    "spec_from_ratios",
]
